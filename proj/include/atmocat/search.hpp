#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atmocat/cql.hpp"
#include "atmocat/store.hpp"

namespace atmocat {

struct SearchQuery {
  std::optional<std::string> free_text;
  std::optional<std::pair<std::string, std::string>> time_range;  // ISO-8601
  std::optional<std::vector<std::string>> formats;
  std::optional<BoundingBox> bbox;
  std::optional<std::string> srs;
  CqlExprPtr cql;  // may be null
  std::int64_t offset = 0;
  std::int64_t limit = 50;  // 1..1000
};

struct SearchResult {
  std::int64_t layer_id = 0;
  std::int64_t service_id = 0;
  std::string title;
  std::string abstract_;
  double quality_score = 0;
  std::string thumbnail_url;  // empty when none
  double match_rank = 0;
};

struct SearchPage {
  std::int64_t total = 0;
  std::int64_t offset = 0;
  std::vector<SearchResult> results;
};

// Conjunction of every supplied facet plus the optional CQL constraint.
// Results ordered by (match_rank desc, quality_score desc, layer_id asc);
// paging applied after sorting. Throws InvalidQuery for bad limits/ranges.
SearchPage search(const CatalogueStore& store, const SearchQuery& q);

// Preview URL for WMS (GetMap, 256x128 png) and WFS (GetFeature, small
// count) layers; empty for everything else. WMS 1.3.0 uses CRS=, 1.1.1 SRS=.
std::string thumbnail_url(const CatalogueRecord& record);

}  // namespace atmocat
