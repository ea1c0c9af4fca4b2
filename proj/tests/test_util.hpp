#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string fixture_path(const std::string& rel) {
  return std::string(ATMOCAT_FIXTURE_DIR) + "/" + rel;
}

inline std::string data_path(const std::string& rel) {
  return std::string(ATMOCAT_DATA_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing test file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string fixture(const std::string& rel) { return read_file(fixture_path(rel)); }

}  // namespace testutil
