#pragma once

#include <string>

#include "atmocat/scoring.hpp"

namespace atmocat {

// Service/CLI configuration; JSON file plus ATMOCAT_* environment
// variable overrides.
struct AppConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::string api_token;  // empty disables auth on mutating routes
  std::string store_path = "atmocat.db";
  std::string vocab_path;       // empty = builtin vocabulary
  std::string geo_table_path;   // empty = builtin host-suffix table
  std::string probe_patterns_path;
  std::string sim_web_manifest;  // when set, transport is the simulated web
  ScoreWeights score_weights;
  double latency_half_life_ms = 2000;
  int probe_interval_ms = 60000;
  int sample_window = 10;
  int relevance_threshold = 1;

  static AppConfig load_file(const std::string& path);
  // Overrides: ATMOCAT_LISTEN, ATMOCAT_PORT, ATMOCAT_TOKEN, ATMOCAT_STORE,
  // ATMOCAT_VOCAB, ATMOCAT_THRESHOLD.
  void apply_env_overrides();
};

}  // namespace atmocat
