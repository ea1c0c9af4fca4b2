#pragma once

#include <string>
#include <string_view>

namespace atmocat {

enum class DocKind { Html, OwsCapabilities, OwsException, Other };

// Classifies a fetched response from its Content-Type header and the first
// 4096 bytes of the body. Body evidence wins over the header. Pure.
DocKind classify_response(std::string_view content_type, std::string_view body_prefix);

const char* to_string(DocKind k);

}  // namespace atmocat
