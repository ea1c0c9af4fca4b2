#include "atmocat/xml.hpp"

#include <expat.h>

#include <algorithm>
#include <cctype>

#include "atmocat/errors.hpp"

namespace atmocat {

namespace {

std::string local_of(std::string_view name) {
  auto pos = name.rfind(':');
  return std::string(pos == std::string_view::npos ? name : name.substr(pos + 1));
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

struct ParseState {
  std::unique_ptr<XmlNode> root;
  XmlNode* current = nullptr;
  bool stopped = false;
};

void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char** atts) {
  auto* st = static_cast<ParseState*>(ud);
  auto node = std::make_unique<XmlNode>();
  node->name = name;
  for (int i = 0; atts[i]; i += 2) node->attrs.emplace_back(atts[i], atts[i + 1]);
  XmlNode* raw = node.get();
  if (!st->current) {
    node->parent = nullptr;
    st->root = std::move(node);
  } else {
    node->parent = st->current;
    st->current->children.push_back(std::move(node));
  }
  st->current = raw;
}

void XMLCALL on_end(void* ud, const XML_Char*) {
  auto* st = static_cast<ParseState*>(ud);
  if (st->current) st->current = const_cast<XmlNode*>(st->current->parent);
}

void XMLCALL on_chars(void* ud, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(ud);
  if (st->current) st->current->text.append(s, static_cast<std::size_t>(len));
}

// Internal entity declarations are refused outright: capabilities documents
// never need them and expansion bombs are a real hazard for a crawler.
void XMLCALL on_entity_decl(void* ud, const XML_Char*, int, const XML_Char*, int,
                            const XML_Char*, const XML_Char*, const XML_Char*,
                            const XML_Char*) {
  auto* st = static_cast<ParseState*>(ud);
  st->stopped = true;
}

}  // namespace

std::string XmlNode::local_name() const { return local_of(name); }

std::string XmlNode::attr(std::string_view local) const {
  for (const auto& [k, v] : attrs)
    if (iequals(local_of(k), local)) return v;
  return "";
}

const XmlNode* XmlNode::first_child(std::string_view local) const {
  for (const auto& c : children)
    if (iequals(c->local_name(), local)) return c.get();
  return nullptr;
}

std::vector<const XmlNode*> XmlNode::children_named(std::string_view local) const {
  std::vector<const XmlNode*> out;
  for (const auto& c : children)
    if (iequals(c->local_name(), local)) out.push_back(c.get());
  return out;
}

std::string XmlNode::child_text(std::string_view local) const {
  const XmlNode* c = first_child(local);
  return c ? trim_copy(c->text) : "";
}

std::string trim_copy(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::unique_ptr<XmlNode> parse_xml(std::string_view bytes, std::size_t max_bytes) {
  if (bytes.size() > max_bytes) throw MalformedXml("document exceeds size limit");
  XML_Parser p = XML_ParserCreate(nullptr);
  if (!p) throw MalformedXml("parser allocation failed");
  ParseState st;
  XML_SetUserData(p, &st);
  XML_SetElementHandler(p, on_start, on_end);
  XML_SetCharacterDataHandler(p, on_chars);
  XML_SetEntityDeclHandler(p, on_entity_decl);

  XML_Status ok = XML_Parse(p, bytes.data(), static_cast<int>(bytes.size()), 1);
  bool stopped = st.stopped;
  std::string err;
  if (ok != XML_STATUS_OK)
    err = XML_ErrorString(XML_GetErrorCode(p));
  XML_ParserFree(p);

  if (stopped) throw MalformedXml("entity declarations are not accepted");
  if (ok != XML_STATUS_OK) throw MalformedXml("xml parse error: " + err);
  if (!st.root) throw MalformedXml("empty document");
  return std::move(st.root);
}

bool looks_like_xml(std::string_view bytes) {
  std::size_t i = 0;
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  return i < bytes.size() && bytes[i] == '<';
}

std::string sniff_root_name(std::string_view prefix) {
  std::size_t i = 0;
  if (prefix.size() >= 3 && prefix.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < prefix.size()) {
    while (i < prefix.size() && std::isspace(static_cast<unsigned char>(prefix[i]))) ++i;
    if (i >= prefix.size() || prefix[i] != '<') return "";
    if (prefix.compare(i, 4, "<!--") == 0) {
      auto end = prefix.find("-->", i + 4);
      if (end == std::string_view::npos) return "";
      i = end + 3;
    } else if (prefix.compare(i, 2, "<?") == 0) {
      auto end = prefix.find("?>", i + 2);
      if (end == std::string_view::npos) return "";
      i = end + 2;
    } else if (prefix.compare(i, 2, "<!") == 0) {
      // DOCTYPE; skip to the matching '>' ignoring any internal subset
      int depth = 0;
      std::size_t j = i + 1;
      for (; j < prefix.size(); ++j) {
        if (prefix[j] == '[') ++depth;
        else if (prefix[j] == ']') --depth;
        else if (prefix[j] == '>' && depth == 0) break;
      }
      if (j >= prefix.size()) return "";
      i = j + 1;
    } else {
      std::size_t j = i + 1;
      std::string name;
      while (j < prefix.size()) {
        char c = prefix[j];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/') break;
        name += c;
        ++j;
      }
      if (name.empty()) return "";
      return local_of(name);
    }
  }
  return "";
}

}  // namespace atmocat
