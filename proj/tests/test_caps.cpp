#include <doctest.h>

#include "atmocat/caps.hpp"
#include "atmocat/errors.hpp"
#include "test_util.hpp"

using namespace atmocat;

TEST_CASE("service kind detection across the corpus") {
  auto kind = [](const char* f) {
    return detect_service_kind(testutil::fixture(std::string("capabilities/") + f));
  };
  CHECK(kind("wms_111.xml") == std::pair(ServiceType::WMS, std::string("1.1.1")));
  CHECK(kind("wms_130_nested.xml") == std::pair(ServiceType::WMS, std::string("1.3.0")));
  CHECK(kind("wfs_110.xml") == std::pair(ServiceType::WFS, std::string("1.1.0")));
  CHECK(kind("wfs_200.xml") == std::pair(ServiceType::WFS, std::string("2.0.0")));
  CHECK(kind("wcs_100.xml") == std::pair(ServiceType::WCS, std::string("1.0.0")));
  CHECK(kind("wcs_201.xml") == std::pair(ServiceType::WCS, std::string("2.0.1")));
  CHECK(kind("csw_202.xml") == std::pair(ServiceType::CSW, std::string("2.0.2")));
  CHECK(kind("wps_100.xml") == std::pair(ServiceType::WPS, std::string("1.0.0")));
}

TEST_CASE("non-capabilities xml is refused") {
  CHECK_THROWS_AS(detect_service_kind(testutil::fixture("capabilities/exception.xml")),
                  NotCapabilities);
  CHECK_THROWS_AS(detect_service_kind("<unrelated/>"), NotCapabilities);
  CHECK_THROWS_AS(detect_service_kind(testutil::fixture("capabilities/truncated.xml")),
                  MalformedXml);
}

TEST_CASE("unsupported versions are refused") {
  CHECK_THROWS_AS(
      parse_capabilities(testutil::fixture("capabilities/wms_unsupported_version.xml"),
                         "http://h/wms"),
      UnsupportedVersion);
}

TEST_CASE("wms 1.1.1: service metadata and layer counts") {
  auto [svc, layers] =
      parse_capabilities(testutil::fixture("capabilities/wms_111.xml"), "http://h/wms");
  CHECK(svc.service_type == ServiceType::WMS);
  CHECK(svc.version == "1.1.1");
  CHECK(svc.title == "Atmospheric Observation WMS");
  CHECK(svc.provider_name == "Example Atmospheric Observatory");
  CHECK(svc.contact == "J. Meridian");
  CHECK(svc.keywords == std::vector<std::string>{"atmosphere", "air temperature",
                                                 "meteorology"});
  CHECK(svc.capabilities_url == "http://h/wms");

  // unnamed group leaf is dropped: two named leaves only
  REQUIRE(layers.size() == 2);
  CHECK(layers[0].name == "air_temp");
  CHECK(layers[1].name == "rel_humidity");
}

TEST_CASE("wms 1.1.1: inheritance worked out by hand") {
  auto [svc, layers] =
      parse_capabilities(testutil::fixture("capabilities/wms_111.xml"), "http://h/wms");
  REQUIRE(layers.size() == 2);

  // air_temp: inherits the root bbox, adds EPSG:3857 to inherited EPSG:4326,
  // and carries its own time extent from <Extent name="time">
  const LayerDraft& at = layers[0];
  REQUIRE(at.bbox.has_value());
  CHECK(at.bbox->min_lon == -180);
  CHECK(at.bbox->max_lat == 90);
  CHECK(at.supported_srs == std::vector<std::string>{"EPSG:4326", "EPSG:3857"});
  REQUIRE(at.time_extent.has_value());
  CHECK(at.time_extent->first == "2010-01-01");
  CHECK(at.time_extent->second == "2015-12-31");
  CHECK(at.formats == std::vector<std::string>{"image/png", "image/jpeg"});

  // rel_humidity: its own bbox overrides the inherited one; srs inherited only
  const LayerDraft& rh = layers[1];
  REQUIRE(rh.bbox.has_value());
  CHECK(rh.bbox->min_lon == -130);
  CHECK(rh.bbox->max_lat == 55);
  CHECK(rh.supported_srs == std::vector<std::string>{"EPSG:4326"});
  CHECK(!rh.time_extent.has_value());
}

TEST_CASE("wms 1.3.0: nested groups flatten to named leaves with inheritance") {
  auto [svc, layers] = parse_capabilities(
      testutil::fixture("capabilities/wms_130_nested.xml"), "http://h/wms");
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].name == "sst");
  CHECK(layers[1].name == "sst_anomaly");
  CHECK(layers[2].name == "wind_speed");

  // sst: bbox from the Temperature-products group (-80..80), CRS chain
  // CRS:84 then EPSG:4326, time dimension of its own
  REQUIRE(layers[0].bbox.has_value());
  CHECK(layers[0].bbox->min_lat == -80);
  CHECK(layers[0].bbox->max_lat == 80);
  CHECK(layers[0].supported_srs == std::vector<std::string>{"CRS:84", "EPSG:4326"});
  REQUIRE(layers[0].time_extent.has_value());
  CHECK(layers[0].time_extent->first == "2000-01-01");

  // sst_anomaly overrides the group bbox
  REQUIRE(layers[1].bbox.has_value());
  CHECK(layers[1].bbox->min_lat == -60);

  // wind_speed: group chain gives world bbox; srs chain CRS:84 + EPSG:3857
  REQUIRE(layers[2].bbox.has_value());
  CHECK(layers[2].bbox->min_lat == -90);
  CHECK(layers[2].supported_srs == std::vector<std::string>{"CRS:84", "EPSG:3857"});
}

TEST_CASE("wfs 1.1.0 and 2.0.0 feature types") {
  auto [svc1, l1] =
      parse_capabilities(testutil::fixture("capabilities/wfs_110.xml"), "http://h/wfs");
  CHECK(svc1.title == "Storm Event Features");
  CHECK(svc1.provider_name == "Example Storm Laboratory");
  CHECK(svc1.contact == "T. Cumulus");
  REQUIRE(l1.size() == 2);
  CHECK(l1[0].name == "storm:reports");
  CHECK(l1[0].supported_srs == std::vector<std::string>{"urn:ogc:def:crs:EPSG::4326",
                                                        "urn:ogc:def:crs:EPSG::3857"});
  CHECK(l1[0].formats == std::vector<std::string>{"text/xml; subtype=gml/3.1.1"});
  REQUIRE(l1[0].bbox.has_value());
  CHECK(l1[0].bbox->min_lon == -125);
  CHECK(l1[0].keywords == std::vector<std::string>{"tornado", "hail"});

  auto [svc2, l2] =
      parse_capabilities(testutil::fixture("capabilities/wfs_200.xml"), "http://h/wfs");
  CHECK(svc2.version == "2.0.0");
  REQUIRE(l2.size() == 1);
  CHECK(l2[0].name == "aq:stations");
  CHECK(l2[0].supported_srs == std::vector<std::string>{"urn:ogc:def:crs:EPSG::4326"});
}

TEST_CASE("wcs 1.0.0 coverages and wcs 2.0.1 summaries") {
  auto [svc1, l1] =
      parse_capabilities(testutil::fixture("capabilities/wcs_100.xml"), "http://h/wcs");
  CHECK(svc1.title == "Precipitation Coverage Service");
  CHECK(svc1.provider_name == "Example Hydromet Service");
  CHECK(svc1.keywords == std::vector<std::string>{"precipitation", "radar", "rainfall"});
  REQUIRE(l1.size() == 2);
  CHECK(l1[0].name == "precip_24h");
  REQUIRE(l1[0].bbox.has_value());
  CHECK(l1[0].bbox->max_lat == 50);

  auto [svc2, l2] =
      parse_capabilities(testutil::fixture("capabilities/wcs_201.xml"), "http://h/wcs");
  CHECK(svc2.version == "2.0.1");
  REQUIRE(l2.size() == 1);
  CHECK(l2[0].name == "aod_550nm_daily");
}

TEST_CASE("csw and wps: identification only, no layers") {
  auto [csw, lc] =
      parse_capabilities(testutil::fixture("capabilities/csw_202.xml"), "http://h/csw");
  CHECK(csw.service_type == ServiceType::CSW);
  CHECK(csw.title == "Climate Metadata Catalogue");
  CHECK(lc.empty());

  auto [wps, lw] =
      parse_capabilities(testutil::fixture("capabilities/wps_100.xml"), "http://h/wps");
  CHECK(wps.service_type == ServiceType::WPS);
  CHECK(wps.title == "Atmospheric Analysis Processing Service");
  CHECK(lw.empty());
}

TEST_CASE("invalid bounding boxes are dropped rather than stored") {
  const char* doc = R"(<WMS_Capabilities version="1.3.0">
    <Capability><Layer><Layer>
      <Name>bad</Name><Title>Bad bbox</Title>
      <EX_GeographicBoundingBox>
        <westBoundLongitude>10</westBoundLongitude>
        <eastBoundLongitude>-10</eastBoundLongitude>
        <southBoundLatitude>0</southBoundLatitude>
        <northBoundLatitude>1</northBoundLatitude>
      </EX_GeographicBoundingBox>
    </Layer></Layer></Capability></WMS_Capabilities>)";
  auto [svc, layers] = parse_capabilities(doc, "http://h/wms");
  REQUIRE(layers.size() == 1);
  CHECK(!layers[0].bbox.has_value());
}

TEST_CASE("bounding box validity and intersection") {
  BoundingBox a{-10, -10, 10, 10}, b{10, 10, 20, 20}, c{11, 11, 20, 20};
  CHECK(a.valid());
  CHECK(a.intersects(b));  // touching counts
  CHECK(b.intersects(a));
  CHECK(!a.intersects(c));
  CHECK(!BoundingBox{5, 0, -5, 0}.valid());
  CHECK(!BoundingBox{0, -100, 1, 0}.valid());
}
