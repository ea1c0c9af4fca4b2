#pragma once

#include <optional>
#include <string>
#include <vector>

namespace atmocat {

// Decomposed absolute http(s) URL. Produced by Url::parse, which also
// normalizes: lowercase scheme/host, default ports dropped, dot-segments
// resolved, fragment stripped, query keys lowercased and pairs sorted by key.
struct Url {
  std::string scheme;
  std::string host;
  std::optional<int> port;  // absent when default for the scheme
  std::string path;         // always begins with '/'
  std::vector<std::pair<std::string, std::string>> query;  // sorted by key

  static Url parse(const std::string& raw);

  std::string str() const;
  std::string host_port() const;
  // Query keys are stored lowercased; lookups fold case accordingly.
  std::optional<std::string> query_value(const std::string& key) const;
  void set_query(const std::string& key, const std::string& value);
};

// Canonical form of an absolute URL. Throws MalformedUrl.
std::string normalize_url(const std::string& raw);

// Resolves a possibly-relative reference against a base, then normalizes.
// Returns nullopt for unresolvable or non-http(s) results.
std::optional<std::string> resolve_url(const std::string& base, const std::string& ref);

}  // namespace atmocat
