#include "atmocat/html.hpp"

#include <cctype>

#include "atmocat/url.hpp"

namespace atmocat {

namespace {

std::string decode_entities(const std::string& s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
      if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
      if (s.compare(i, 6, "&#x2F;") == 0) { out += '/'; i += 6; continue; }
      if (s.compare(i, 5, "&#39;") == 0) { out += '\''; i += 5; continue; }
    }
    out += s[i++];
  }
  return out;
}

}  // namespace

std::set<std::string> extract_links(std::string_view html, const std::string& base) {
  std::set<std::string> out;
  std::size_t i = 0;
  const std::string_view h = html;
  while (i < h.size()) {
    std::size_t lt = h.find('<', i);
    if (lt == std::string_view::npos) break;
    // only <a ...> tags matter
    std::size_t t = lt + 1;
    if (t >= h.size() || (h[t] != 'a' && h[t] != 'A')) { i = lt + 1; continue; }
    if (t + 1 < h.size() && !std::isspace(static_cast<unsigned char>(h[t + 1])) &&
        h[t + 1] != '>') {
      i = lt + 1;
      continue;
    }
    std::size_t gt = h.find('>', lt);
    if (gt == std::string_view::npos) break;
    std::string_view tag = h.substr(lt, gt - lt);

    // locate href= inside the tag, case-insensitively
    for (std::size_t k = 0; k + 5 <= tag.size(); ++k) {
      if ((tag[k] == 'h' || tag[k] == 'H') &&
          (tag.compare(k, 4, "href") == 0 || tag.compare(k, 4, "HREF") == 0 ||
           tag.compare(k, 4, "Href") == 0)) {
        std::size_t p = k + 4;
        while (p < tag.size() && std::isspace(static_cast<unsigned char>(tag[p]))) ++p;
        if (p >= tag.size() || tag[p] != '=') continue;
        ++p;
        while (p < tag.size() && std::isspace(static_cast<unsigned char>(tag[p]))) ++p;
        if (p >= tag.size()) break;
        std::string value;
        if (tag[p] == '"' || tag[p] == '\'') {
          char q = tag[p++];
          std::size_t end = tag.find(q, p);
          if (end == std::string_view::npos) break;
          value.assign(tag.substr(p, end - p));
        } else {
          std::size_t end = p;
          while (end < tag.size() && !std::isspace(static_cast<unsigned char>(tag[end])))
            ++end;
          value.assign(tag.substr(p, end - p));
        }
        if (auto abs = resolve_url(base, decode_entities(value))) out.insert(*abs);
        break;
      }
    }
    i = gt + 1;
  }
  return out;
}

}  // namespace atmocat
