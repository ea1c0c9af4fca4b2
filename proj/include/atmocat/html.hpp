#pragma once

#include <set>
#include <string>
#include <string_view>

namespace atmocat {

// Anchor hrefs from an HTML page, resolved against base and normalized.
// Malformed or non-http(s) references are skipped. Tolerant scanner, not a
// conforming HTML parser: real pages rarely are conforming either.
std::set<std::string> extract_links(std::string_view html, const std::string& base);

}  // namespace atmocat
