#include "atmocat/probes.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "atmocat/errors.hpp"
#include "atmocat/url.hpp"

namespace atmocat {

namespace {

std::vector<std::string> path_segments(const std::string& path) {
  std::vector<std::string> segs;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) segs.push_back(cur);
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) segs.push_back(cur);
  return segs;
}

}  // namespace

ProbePatterns ProbePatterns::defaults() {
  ProbePatterns p;
  p.rules = {
      {"ows", {"WMS", "WFS", "WCS", "WPS", "CSW"}},
      {"wms", {"WMS"}},
      {"wfs", {"WFS"}},
      {"wcs", {"WCS"}},
      {"wps", {"WPS"}},
      {"csw", {"CSW"}},
  };
  return p;
}

ProbePatterns ProbePatterns::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open probe pattern config: " + path);
  nlohmann::json j;
  in >> j;
  ProbePatterns p;
  for (const auto& r : j.at("patterns")) {
    std::vector<std::string> services;
    for (const auto& s : r.at("services")) services.push_back(s.get<std::string>());
    p.rules.emplace_back(r.at("segment").get<std::string>(), std::move(services));
  }
  return p;
}

std::vector<std::string> derive_ows_probes(const std::string& url,
                                           const ProbePatterns& patterns) {
  Url u = Url::parse(url);
  if (u.query_value("service")) {
    u.set_query("request", "GetCapabilities");
    return {u.str()};
  }
  auto segs = path_segments(u.path);
  std::vector<std::string> out;
  for (const auto& [segment, services] : patterns.rules) {
    if (std::find(segs.begin(), segs.end(), segment) == segs.end()) continue;
    for (const auto& svc : services) {
      Url probe = u;
      probe.set_query("service", svc);
      probe.set_query("request", "GetCapabilities");
      std::string s = probe.str();
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
  }
  return out;
}

}  // namespace atmocat
