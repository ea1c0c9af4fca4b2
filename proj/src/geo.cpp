#include "atmocat/geo.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace atmocat {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::shared_ptr<TableGeoResolver> TableGeoResolver::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open geo table: " + path);
  auto r = std::make_shared<TableGeoResolver>();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string suffix, country, lat_s, lon_s;
    if (!std::getline(ls, suffix, '\t') || !std::getline(ls, country, '\t') ||
        !std::getline(ls, lat_s, '\t') || !std::getline(ls, lon_s))
      continue;
    r->add(suffix, GeoLocation{std::stod(lat_s), std::stod(lon_s), country});
  }
  return r;
}

std::shared_ptr<TableGeoResolver> TableGeoResolver::builtin() {
  auto r = std::make_shared<TableGeoResolver>();
  r->add(".gov", {39.8, -98.6, "us"});
  r->add(".mil", {38.9, -77.0, "us"});
  r->add(".edu", {40.0, -89.0, "us"});
  r->add(".us", {39.8, -98.6, "us"});
  r->add(".ca", {56.1, -106.3, "ca"});
  r->add(".de", {51.2, 10.5, "de"});
  r->add(".uk", {55.4, -3.4, "gb"});
  r->add(".fr", {46.2, 2.2, "fr"});
  r->add(".it", {41.9, 12.6, "it"});
  r->add(".es", {40.5, -3.7, "es"});
  r->add(".nl", {52.1, 5.3, "nl"});
  r->add(".au", {-25.3, 133.8, "au"});
  r->add(".no", {60.5, 8.5, "no"});
  r->add(".fi", {61.9, 25.7, "fi"});
  r->add(".jp", {36.2, 138.3, "jp"});
  return r;
}

void TableGeoResolver::add(const std::string& suffix, const GeoLocation& loc) {
  by_suffix_[lower(suffix)] = loc;
}

GeoLocation TableGeoResolver::resolve(const std::string& host) const {
  std::string h = lower(host);
  // strip a :port if present
  auto colon = h.find(':');
  if (colon != std::string::npos) h = h.substr(0, colon);

  const GeoLocation* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& [suffix, loc] : by_suffix_) {
    bool match = (suffix == h) || (h.size() > suffix.size() && h.ends_with(suffix) &&
                                   (suffix[0] == '.' ||
                                    h[h.size() - suffix.size() - 1] == '.'));
    if (match && suffix.size() >= best_len) {
      best = &loc;
      best_len = suffix.size();
    }
  }
  return best ? *best : GeoLocation{};
}

}  // namespace atmocat
