#include <doctest.h>

#include <algorithm>

#include "atmocat/errors.hpp"
#include "atmocat/search.hpp"
#include "test_util.hpp"

using namespace atmocat;

namespace {

// Store with a small, hand-checkable corpus.
void seed(CatalogueStore& s) {
  ServiceDraft wms;
  wms.service_type = ServiceType::WMS;
  wms.version = "1.3.0";
  wms.title = "Ocean WMS";
  wms.capabilities_url = "http://ocean.test/wms";
  wms.provider_name = "Ocean Org";

  LayerDraft sst;
  sst.name = "sst";
  sst.title = "Sea Surface Temperature";
  sst.abstract_ = "Daily SST composite";
  sst.keywords = {"SST"};
  sst.bbox = BoundingBox{-180, -90, 180, 90};
  sst.supported_srs = {"EPSG:4326", "CRS:84"};
  sst.formats = {"image/png"};
  sst.time_extent = std::make_pair("2000-01-01", "2010-12-31");

  LayerDraft wind;
  wind.name = "wind";
  wind.title = "Wind Speed";
  wind.abstract_ = "Surface wind";
  wind.bbox = BoundingBox{-20, 30, 20, 60};
  wind.supported_srs = {"EPSG:3857"};
  wind.formats = {"image/jpeg"};
  wind.time_extent = std::make_pair("2015-01-01", "2016-01-01");

  s.upsert_service(wms, {0, 0, "us"}, {sst, wind});

  ServiceDraft wfs;
  wfs.service_type = ServiceType::WFS;
  wfs.version = "2.0.0";
  wfs.title = "Storm WFS";
  wfs.capabilities_url = "http://storm.test/wfs";

  LayerDraft storms;
  storms.name = "storms";
  storms.title = "Storm Reports";
  storms.abstract_ = "Severe storm reports incl. SST-driven events";
  storms.bbox = BoundingBox{-125, 24, -66, 50};
  s.upsert_service(wfs, {0, 0, "ca"}, {storms});
}

}  // namespace

TEST_CASE("free text: all tokens must appear in any_text") {
  CatalogueStore s(":memory:");
  seed(s);
  auto page = search(s, [] {
    SearchQuery q;
    q.free_text = "sst";
    return q;
  }());
  CHECK(page.total == 2);  // sst layer + storms abstract

  SearchQuery q2;
  q2.free_text = "sst daily";
  CHECK(search(s, q2).total == 1);

  SearchQuery q3;
  q3.free_text = "absent-token";
  CHECK(search(s, q3).total == 0);
}

TEST_CASE("facets conjoin: bbox, srs, format, time") {
  CatalogueStore s(":memory:");
  seed(s);

  SearchQuery q;
  q.bbox = BoundingBox{-130, 20, -60, 55};
  CHECK(search(s, q).total == 2);  // sst (world) + storms; wind box disjoint

  q.srs = "epsg:3857";  // case-insensitive
  CHECK(search(s, q).total == 0);  // wind has 3857 but fails the bbox facet

  SearchQuery qf;
  qf.formats = std::vector<std::string>{"image/jpeg"};
  auto page = search(s, qf);
  REQUIRE(page.total == 1);
  CHECK(page.results[0].title == "Wind Speed");

  SearchQuery qt;
  qt.time_range = std::make_pair(std::string("2012-01-01"), std::string("2014-01-01"));
  CHECK(search(s, qt).total == 0);  // gap between the two extents
  qt.time_range = std::make_pair(std::string("2009-01-01"), std::string("2015-06-01"));
  CHECK(search(s, qt).total == 2);  // overlaps both extents
}

TEST_CASE("cql constraint composes with facets") {
  CatalogueStore s(":memory:");
  seed(s);
  SearchQuery q;
  q.cql = parse_cql("service_type = 'WFS'");
  auto page = search(s, q);
  REQUIRE(page.total == 1);
  CHECK(page.results[0].title == "Storm Reports");

  q.free_text = "wind";
  CHECK(search(s, q).total == 0);  // conjunction
}

TEST_CASE("ranking: title-hit fraction, then quality, then id") {
  CatalogueStore s(":memory:");
  seed(s);
  SearchQuery q;
  q.free_text = "surface";
  auto page = search(s, q);
  REQUIRE(page.total == 2);
  // "surface" hits the SST layer's title but only the wind layer's abstract
  CHECK(page.results[0].title == "Sea Surface Temperature");
  CHECK(page.results[0].match_rank > page.results[1].match_rank);

  // no free text: rank zero, quality then id ordering
  auto lid_wind = page.results[1].layer_id;
  s.set_layer_score(lid_wind, 0.9);
  SearchQuery all;
  auto everything = search(s, all);
  REQUIRE(everything.total == 3);
  CHECK(everything.results[0].layer_id == lid_wind);
}

TEST_CASE("paging and limits") {
  CatalogueStore s(":memory:");
  seed(s);
  SearchQuery q;
  q.limit = 2;
  auto p1 = search(s, q);
  CHECK(p1.total == 3);
  CHECK(p1.results.size() == 2);
  q.offset = 2;
  auto p2 = search(s, q);
  CHECK(p2.results.size() == 1);
  q.offset = 50;
  CHECK(search(s, q).results.empty());
  CHECK(search(s, q).total == 3);

  SearchQuery bad;
  bad.limit = 0;
  CHECK_THROWS_AS(search(s, bad), InvalidQuery);
  bad.limit = 1001;
  CHECK_THROWS_AS(search(s, bad), InvalidQuery);
  SearchQuery neg;
  neg.offset = -1;
  CHECK_THROWS_AS(search(s, neg), InvalidQuery);
  SearchQuery tr;
  tr.time_range = std::make_pair(std::string("2020"), std::string("2010"));
  CHECK_THROWS_AS(search(s, tr), InvalidQuery);
}

TEST_CASE("thumbnail urls: wms 1.3.0 uses crs, 1.1.1 uses srs, wfs by version") {
  CatalogueRecord r;
  r.service.service_type = ServiceType::WMS;
  r.service.version = "1.3.0";
  r.service.url = "http://h/wms";
  r.layer.name = "sst";
  r.layer.bbox = BoundingBox{-180, -90, 180, 90};

  std::string t = thumbnail_url(r);
  CHECK(t.find("request=GetMap") != std::string::npos);
  CHECK(t.find("crs=CRS:84") != std::string::npos);
  CHECK(t.find("srs=") == std::string::npos);
  CHECK(t.find("width=256") != std::string::npos);
  CHECK(t.find("height=128") != std::string::npos);
  CHECK(t.find("format=image/png") != std::string::npos);
  CHECK(t.find("bbox=-180,-90,180,90") != std::string::npos);

  r.service.version = "1.1.1";
  t = thumbnail_url(r);
  CHECK(t.find("srs=EPSG:4326") != std::string::npos);
  CHECK(t.find("crs=") == std::string::npos);

  r.service.service_type = ServiceType::WFS;
  r.service.version = "2.0.0";
  t = thumbnail_url(r);
  CHECK(t.find("request=GetFeature") != std::string::npos);
  CHECK(t.find("typenames=sst") != std::string::npos);
  CHECK(t.find("count=10") != std::string::npos);

  r.service.version = "1.1.0";
  t = thumbnail_url(r);
  CHECK(t.find("typename=sst") != std::string::npos);
  CHECK(t.find("maxfeatures=10") != std::string::npos);

  r.service.service_type = ServiceType::CSW;
  CHECK(thumbnail_url(r).empty());
}

TEST_CASE("search results carry thumbnails consistent with thumbnail_url") {
  CatalogueStore s(":memory:");
  seed(s);
  for (const auto& rec : s.list_records()) {
    SearchQuery q;
    q.cql = parse_cql("name = '" + rec.layer.name + "'");
    auto page = search(s, q);
    REQUIRE(page.total == 1);
    CHECK(page.results[0].thumbnail_url == thumbnail_url(rec));
  }
}
