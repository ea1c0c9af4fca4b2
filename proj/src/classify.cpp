#include "atmocat/classify.hpp"

#include <algorithm>
#include <cctype>

#include "atmocat/xml.hpp"

namespace atmocat {

namespace {

std::string lower(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return r;
}

bool sniff_html(std::string_view body) {
  std::string head = lower(body.substr(0, std::min<std::size_t>(body.size(), 1024)));
  return head.find("<html") != std::string::npos ||
         head.find("<!doctype html") != std::string::npos ||
         head.find("<body") != std::string::npos;
}

}  // namespace

DocKind classify_response(std::string_view content_type, std::string_view body_prefix) {
  std::string_view sniff = body_prefix.substr(0, std::min<std::size_t>(body_prefix.size(), 4096));

  std::string root = sniff_root_name(sniff);
  if (!root.empty()) {
    std::string rl = lower(root);
    if (rl.size() >= 12 && rl.ends_with("capabilities")) return DocKind::OwsCapabilities;
    if (rl == "serviceexceptionreport" || rl == "exceptionreport")
      return DocKind::OwsException;
    if (rl == "html") return DocKind::Html;
    if (looks_like_xml(sniff)) return DocKind::Other;
  }
  if (sniff_html(sniff)) return DocKind::Html;

  std::string ct = lower(content_type);
  if (ct.find("text/html") != std::string::npos ||
      ct.find("application/xhtml") != std::string::npos)
    return DocKind::Html;
  return DocKind::Other;
}

const char* to_string(DocKind k) {
  switch (k) {
    case DocKind::Html: return "html";
    case DocKind::OwsCapabilities: return "ows-capabilities";
    case DocKind::OwsException: return "ows-exception";
    case DocKind::Other: return "other";
  }
  return "other";
}

}  // namespace atmocat
