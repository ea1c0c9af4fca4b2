#include "atmocat/url.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "atmocat/errors.hpp"

namespace atmocat {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool valid_host(const std::string& h) {
  if (h.empty()) return false;
  for (unsigned char c : h) {
    if (!(std::isalnum(c) || c == '.' || c == '-' || c == '_')) return false;
  }
  return true;
}

// RFC 3986 dot-segment removal over a path that starts with '/'.
std::string remove_dot_segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i + 1);
    std::string seg = path.substr(i, (j == std::string::npos ? path.size() : j) - i);
    i = (j == std::string::npos) ? path.size() : j;
    if (seg == "/.") continue;
    if (seg == "/..") {
      if (!out.empty()) out.pop_back();
      continue;
    }
    out.push_back(seg);
  }
  std::string r;
  for (auto& s : out) r += s;
  // trailing "/." or "/.." leaves a bare directory reference
  if (path.size() >= 2 && (path.ends_with("/.") || path.ends_with("/..")))
    r += '/';
  if (r.empty()) r = "/";
  return r;
}

std::vector<std::pair<std::string, std::string>> parse_query(const std::string& q) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t i = 0;
  while (i <= q.size() && !q.empty()) {
    std::size_t j = q.find('&', i);
    std::string kv = q.substr(i, (j == std::string::npos ? q.size() : j) - i);
    if (!kv.empty()) {
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        pairs.emplace_back(lower(kv), "");
      else
        pairs.emplace_back(lower(kv.substr(0, eq)), kv.substr(eq + 1));
    }
    if (j == std::string::npos) break;
    i = j + 1;
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return pairs;
}

}  // namespace

Url Url::parse(const std::string& raw) {
  std::size_t sep = raw.find("://");
  if (sep == std::string::npos) throw MalformedUrl("missing scheme: " + raw);
  Url u;
  u.scheme = lower(raw.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https")
    throw MalformedUrl("unsupported scheme: " + u.scheme);

  std::size_t rest = sep + 3;
  std::size_t path_start = raw.find_first_of("/?#", rest);
  std::string authority =
      raw.substr(rest, (path_start == std::string::npos ? raw.size() : path_start) - rest);
  // userinfo is not supported; reject rather than mis-parse
  if (authority.find('@') != std::string::npos)
    throw MalformedUrl("userinfo not supported: " + raw);

  std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    std::string port_s = authority.substr(colon + 1);
    if (port_s.empty() || !std::all_of(port_s.begin(), port_s.end(),
                                       [](unsigned char c) { return std::isdigit(c); }))
      throw MalformedUrl("bad port: " + raw);
    long p = std::stol(port_s);
    if (p < 1 || p > 65535) throw MalformedUrl("port out of range: " + raw);
    u.host = lower(authority.substr(0, colon));
    int def = (u.scheme == "http") ? 80 : 443;
    if (static_cast<int>(p) != def) u.port = static_cast<int>(p);
  } else {
    u.host = lower(authority);
  }
  if (!valid_host(u.host)) throw MalformedUrl("bad host: " + raw);

  std::string path = "/", query;
  if (path_start != std::string::npos) {
    std::string tail = raw.substr(path_start);
    std::size_t frag = tail.find('#');
    if (frag != std::string::npos) tail = tail.substr(0, frag);
    std::size_t qm = tail.find('?');
    if (qm != std::string::npos) {
      query = tail.substr(qm + 1);
      tail = tail.substr(0, qm);
    }
    if (!tail.empty()) path = tail;
    if (path.empty() || path[0] != '/') path = "/" + path;
  }
  for (unsigned char c : path)
    if (c <= 0x20 || c == 0x7f) throw MalformedUrl("whitespace/control in path: " + raw);
  for (unsigned char c : query)
    if (c <= 0x20 || c == 0x7f) throw MalformedUrl("whitespace/control in query: " + raw);

  u.path = remove_dot_segments(path);
  u.query = parse_query(query);
  return u;
}

std::string Url::str() const {
  std::ostringstream os;
  os << scheme << "://" << host;
  if (port) os << ':' << *port;
  os << path;
  bool first = true;
  for (const auto& [k, v] : query) {
    os << (first ? '?' : '&') << k;
    if (!v.empty()) os << '=' << v;
    first = false;
  }
  return os.str();
}

std::string Url::host_port() const {
  return port ? host + ":" + std::to_string(*port) : host;
}

std::optional<std::string> Url::query_value(const std::string& key) const {
  std::string lk = lower(key);
  for (const auto& [k, v] : query)
    if (k == lk) return v;
  return std::nullopt;
}

void Url::set_query(const std::string& key, const std::string& value) {
  std::string lk = lower(key);
  for (auto& [k, v] : query) {
    if (k == lk) {
      v = value;
      return;
    }
  }
  query.emplace_back(lk, value);
  std::stable_sort(query.begin(), query.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
}

std::string normalize_url(const std::string& raw) { return Url::parse(raw).str(); }

std::optional<std::string> resolve_url(const std::string& base, const std::string& ref) {
  try {
    std::string r = ref;
    // trim surrounding whitespace
    auto b = r.find_first_not_of(" \t\r\n");
    auto e = r.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return std::nullopt;
    r = r.substr(b, e - b + 1);
    if (r.empty() || r[0] == '#') return std::nullopt;

    if (r.find("://") != std::string::npos) return normalize_url(r);
    std::size_t scheme_end = r.find(':');
    std::size_t slash = r.find('/');
    if (scheme_end != std::string::npos && (slash == std::string::npos || scheme_end < slash))
      return std::nullopt;  // non-http scheme like mailto: or javascript:

    Url bu = Url::parse(base);
    if (r.starts_with("//")) return normalize_url(bu.scheme + ":" + r);
    std::string prefix = bu.scheme + "://" + bu.host_port();
    if (r[0] == '/') return normalize_url(prefix + r);
    if (r[0] == '?') return normalize_url(prefix + bu.path + r);
    // relative path: resolve against the base directory
    std::string dir = bu.path.substr(0, bu.path.rfind('/') + 1);
    return normalize_url(prefix + dir + r);
  } catch (const MalformedUrl&) {
    return std::nullopt;
  }
}

}  // namespace atmocat
