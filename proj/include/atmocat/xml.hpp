#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace atmocat {

// Minimal DOM over an expat parse. Element names keep their raw form;
// local_name() strips any namespace prefix, which is how all downstream
// matching works (capabilities documents in the wild use wildly
// inconsistent prefixes).
struct XmlNode {
  std::string name;  // as written, possibly "prefix:local"
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // concatenated character data of direct children
  std::vector<std::unique_ptr<XmlNode>> children;
  const XmlNode* parent = nullptr;

  std::string local_name() const;
  // Case-insensitive attribute lookup by local name; "" when absent.
  std::string attr(std::string_view local) const;
  const XmlNode* first_child(std::string_view local) const;
  std::vector<const XmlNode*> children_named(std::string_view local) const;
  // Trimmed text of the first child element with the given local name.
  std::string child_text(std::string_view local) const;
};

// Parses a full document; throws MalformedXml on any well-formedness error
// or when the input exceeds max_bytes (default 32 MiB).
std::unique_ptr<XmlNode> parse_xml(std::string_view bytes,
                                   std::size_t max_bytes = 32u << 20);

// True when bytes look like an XML document (optional BOM/whitespace then '<').
bool looks_like_xml(std::string_view bytes);

// Root element name of an XML prefix without building a DOM; empty when
// undecidable. Used by response classification on body prefixes that may
// be truncated mid-document.
std::string sniff_root_name(std::string_view prefix);

std::string trim_copy(std::string_view s);

}  // namespace atmocat
