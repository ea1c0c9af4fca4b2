#pragma once

#include <string>
#include <vector>

namespace atmocat {

// Path-segment heuristics mapping endpoint conventions to candidate OWS
// types. Loaded from config so new conventions need no rebuild.
struct ProbePatterns {
  // (path segment, service types it implies)
  std::vector<std::pair<std::string, std::vector<std::string>>> rules;

  static ProbePatterns defaults();
  // JSON file: {"patterns": [{"segment": "wms", "services": ["WMS"]}, ...]}
  static ProbePatterns load_file(const std::string& path);
};

// Candidate GetCapabilities URLs for a normalized URL. A URL that already
// carries service= yields itself with request=GetCapabilities ensured;
// otherwise path-segment patterns drive one probe per implied service type.
std::vector<std::string> derive_ows_probes(const std::string& url,
                                           const ProbePatterns& patterns = ProbePatterns::defaults());

}  // namespace atmocat
