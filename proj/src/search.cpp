#include "atmocat/search.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "atmocat/errors.hpp"
#include "atmocat/url.hpp"

namespace atmocat {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

bool time_ranges_overlap(const std::pair<std::string, std::string>& a,
                         const std::pair<std::string, std::string>& b) {
  // ISO-8601 timestamps order lexicographically
  return a.first <= b.second && b.first <= a.second;
}

bool matches_facets(const CatalogueRecord& r, const EvalRecord& ev, const SearchQuery& q,
                    const std::vector<std::string>& free_tokens) {
  for (const auto& tok : free_tokens)
    if (!contains_ci(ev.any_text, tok)) return false;
  if (q.time_range) {
    if (!r.meta.time_extent) return false;
    if (!time_ranges_overlap(*q.time_range, *r.meta.time_extent)) return false;
  }
  if (q.formats && !q.formats->empty()) {
    bool any = false;
    for (const auto& want : *q.formats)
      for (const auto& have : r.meta.formats)
        if (lower(have) == lower(want)) any = true;
    if (!any) return false;
  }
  if (q.bbox) {
    if (!r.layer.bbox || !r.layer.bbox->intersects(*q.bbox)) return false;
  }
  if (q.srs) {
    bool any = false;
    for (const auto& s : r.layer.supported_srs)
      if (lower(s) == lower(*q.srs)) any = true;
    if (!any) return false;
  }
  if (q.cql && !evaluate(*q.cql, ev)) return false;
  return true;
}

double rank_of(const CatalogueRecord& r, const std::vector<std::string>& free_tokens) {
  if (free_tokens.empty()) return 0;
  int hits = 0;
  for (const auto& tok : free_tokens)
    if (contains_ci(r.meta.title, tok)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(free_tokens.size());
}

}  // namespace

SearchPage search(const CatalogueStore& store, const SearchQuery& q) {
  if (q.limit < 1 || q.limit > 1000)
    throw InvalidQuery("limit must be in [1, 1000]");
  if (q.offset < 0) throw InvalidQuery("offset must be non-negative");
  if (q.time_range && q.time_range->first > q.time_range->second)
    throw InvalidQuery("time range start must not exceed end");

  std::vector<std::string> free_tokens;
  if (q.free_text) free_tokens = whitespace_tokens(*q.free_text);

  std::vector<SearchResult> all;
  for (const auto& r : store.list_records()) {
    EvalRecord ev = to_eval_record(r);
    if (!matches_facets(r, ev, q, free_tokens)) continue;
    SearchResult res;
    res.layer_id = r.layer.layer_id;
    res.service_id = r.service.service_id;
    res.title = r.meta.title;
    res.abstract_ = r.meta.abstract_;
    res.quality_score = r.layer.quality_score;
    res.thumbnail_url = thumbnail_url(r);
    res.match_rank = rank_of(r, free_tokens);
    all.push_back(std::move(res));
  }
  std::sort(all.begin(), all.end(), [](const SearchResult& a, const SearchResult& b) {
    if (a.match_rank != b.match_rank) return a.match_rank > b.match_rank;
    if (a.quality_score != b.quality_score) return a.quality_score > b.quality_score;
    return a.layer_id < b.layer_id;
  });

  SearchPage page;
  page.total = static_cast<std::int64_t>(all.size());
  page.offset = q.offset;
  for (std::int64_t i = q.offset;
       i < page.total && static_cast<std::int64_t>(page.results.size()) < q.limit; ++i)
    page.results.push_back(all[static_cast<std::size_t>(i)]);
  return page;
}

std::string thumbnail_url(const CatalogueRecord& r) {
  BoundingBox world{-180, -90, 180, 90};
  BoundingBox bbox = r.layer.bbox.value_or(world);
  std::ostringstream bb;
  bb << bbox.min_lon << ',' << bbox.min_lat << ',' << bbox.max_lon << ',' << bbox.max_lat;

  try {
    if (r.service.service_type == ServiceType::WMS) {
      Url u = Url::parse(r.service.url);
      bool v130 = r.service.version == "1.3.0";
      u.set_query("service", "WMS");
      u.set_query("request", "GetMap");
      u.set_query("version", r.service.version.empty() ? "1.3.0" : r.service.version);
      u.set_query("layers", r.layer.name);
      u.set_query("styles", "");
      // 1.3.0 renamed the reference-system parameter and, for EPSG:4326,
      // flipped the axis order; stick to CRS:84 to keep lon/lat ordering
      if (v130) {
        u.set_query("crs", "CRS:84");
      } else {
        u.set_query("srs", "EPSG:4326");
      }
      u.set_query("bbox", bb.str());
      u.set_query("width", "256");
      u.set_query("height", "128");
      u.set_query("format", "image/png");
      return u.str();
    }
    if (r.service.service_type == ServiceType::WFS) {
      Url u = Url::parse(r.service.url);
      u.set_query("service", "WFS");
      u.set_query("request", "GetFeature");
      u.set_query("version", r.service.version.empty() ? "2.0.0" : r.service.version);
      if (r.service.version == "2.0.0") {
        u.set_query("typenames", r.layer.name);
        u.set_query("count", "10");
      } else {
        u.set_query("typename", r.layer.name);
        u.set_query("maxfeatures", "10");
      }
      return u.str();
    }
  } catch (const MalformedUrl&) {
    return "";
  }
  return "";
}

}  // namespace atmocat
