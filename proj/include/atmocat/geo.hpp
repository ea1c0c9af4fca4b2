#pragma once

#include <map>
#include <memory>
#include <string>

#include "atmocat/store.hpp"

namespace atmocat {

// Host geolocation. Live IP geolocation is deliberately not wired in;
// the shipped implementation resolves by host suffix from an offline table.
class GeoResolver {
 public:
  virtual ~GeoResolver() = default;
  virtual GeoLocation resolve(const std::string& host) const = 0;
};

class TableGeoResolver : public GeoResolver {
 public:
  // TSV rows: host-suffix <TAB> country <TAB> lat <TAB> lon
  // Exact hosts and suffixes both work; the longest matching suffix wins.
  static std::shared_ptr<TableGeoResolver> load_file(const std::string& path);
  static std::shared_ptr<TableGeoResolver> builtin();

  void add(const std::string& suffix, const GeoLocation& loc);
  GeoLocation resolve(const std::string& host) const override;

 private:
  std::map<std::string, GeoLocation> by_suffix_;
};

}  // namespace atmocat
