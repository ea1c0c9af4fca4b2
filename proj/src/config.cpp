#include "atmocat/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

using nlohmann::json;

namespace atmocat {

AppConfig AppConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  AppConfig c;
  c.listen_address = j.value("listen", c.listen_address);
  c.port = j.value("port", c.port);
  c.api_token = j.value("apiToken", c.api_token);
  c.store_path = j.value("store", c.store_path);
  c.vocab_path = j.value("vocabulary", c.vocab_path);
  c.geo_table_path = j.value("geoTable", c.geo_table_path);
  c.probe_patterns_path = j.value("probePatterns", c.probe_patterns_path);
  c.sim_web_manifest = j.value("simWebManifest", c.sim_web_manifest);
  if (j.contains("scoring")) {
    const auto& s = j["scoring"];
    c.score_weights.completeness = s.value("completenessWeight", c.score_weights.completeness);
    c.score_weights.latency = s.value("latencyWeight", c.score_weights.latency);
    c.latency_half_life_ms = s.value("halfLifeMs", c.latency_half_life_ms);
    c.probe_interval_ms = s.value("probeIntervalMs", c.probe_interval_ms);
    c.sample_window = s.value("sampleWindow", c.sample_window);
  }
  c.relevance_threshold = j.value("relevanceThreshold", c.relevance_threshold);
  c.apply_env_overrides();
  return c;
}

void AppConfig::apply_env_overrides() {
  if (const char* v = std::getenv("ATMOCAT_LISTEN")) listen_address = v;
  if (const char* v = std::getenv("ATMOCAT_PORT")) port = std::atoi(v);
  if (const char* v = std::getenv("ATMOCAT_TOKEN")) api_token = v;
  if (const char* v = std::getenv("ATMOCAT_STORE")) store_path = v;
  if (const char* v = std::getenv("ATMOCAT_VOCAB")) vocab_path = v;
  if (const char* v = std::getenv("ATMOCAT_THRESHOLD")) relevance_threshold = std::atoi(v);
}

}  // namespace atmocat
