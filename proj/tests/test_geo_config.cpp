#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "atmocat/config.hpp"
#include "atmocat/geo.hpp"
#include "test_util.hpp"

using namespace atmocat;

TEST_CASE("builtin geo table maps common suffixes") {
  auto geo = TableGeoResolver::builtin();
  CHECK(geo->resolve("data.noaa.gov").country == "us");
  CHECK(geo->resolve("ocean.example.edu").country == "us");
  CHECK(geo->resolve("www.dwd.de").country == "de");
  CHECK(geo->resolve("geo.canada.ca").country == "ca");
  CHECK(geo->resolve("unknown.example").country == "unknown");
}

TEST_CASE("longest suffix wins and matches only at dot boundaries") {
  TableGeoResolver geo;
  geo.add(".example", {0, 0, "generic"});
  geo.add("ocean.example", {0, 0, "ocean"});
  geo.add(".de", {0, 0, "de"});

  CHECK(geo.resolve("ocean.example").country == "ocean");       // exact
  CHECK(geo.resolve("www.ocean.example").country == "ocean");   // longest suffix
  CHECK(geo.resolve("land.example").country == "generic");
  CHECK(geo.resolve("notocean.example").country == "generic");  // no dot boundary
  CHECK(geo.resolve("bund.de").country == "de");
  CHECK(geo.resolve("bunde").country == "unknown");  // "de" is not a suffix match
  CHECK(geo.resolve("OCEAN.EXAMPLE").country == "ocean");       // case-insensitive
  CHECK(geo.resolve("ocean.example:8080").country == "ocean");  // port stripped
}

TEST_CASE("geo table file loads tsv with comments") {
  std::string path = "geo_test_table.tsv";
  {
    std::ofstream out(path);
    out << "# suffix\tcountry\tlat\tlon\n";
    out << "\n";
    out << "geoportal.example\tde\t51.0\t10.4\n";
    out << ".ca\tca\t56.1\t-106.3\n";
  }
  auto geo = TableGeoResolver::load_file(path);
  auto loc = geo->resolve("www.geoportal.example");
  CHECK(loc.country == "de");
  CHECK(loc.latitude == doctest::Approx(51.0));
  CHECK(loc.longitude == doctest::Approx(10.4));
  CHECK(geo->resolve("gc.ca").country == "ca");
  std::remove(path.c_str());

  CHECK_THROWS_AS(TableGeoResolver::load_file("no/such/table.tsv"), std::runtime_error);
}

TEST_CASE("shipped geo table resolves the simulated-web hosts") {
  auto geo = TableGeoResolver::load_file(testutil::data_path("../configs/geo_table.tsv"));
  CHECK(geo->resolve("www.geoportal.example").country == "de");
  CHECK(geo->resolve("ocean.example.edu").country == "us");
  CHECK(geo->resolve("data.hydromet.example").country == "ca");
}

TEST_CASE("app config loads json and applies env overrides") {
  // make sure no stray overrides leak in from the outside
  for (const char* v : {"ATMOCAT_LISTEN", "ATMOCAT_PORT", "ATMOCAT_TOKEN",
                        "ATMOCAT_STORE", "ATMOCAT_VOCAB", "ATMOCAT_THRESHOLD"})
    unsetenv(v);

  std::string path = "config_test.json";
  {
    std::ofstream out(path);
    out << R"({
      "listen": "0.0.0.0",
      "port": 9100,
      "apiToken": "sekrit",
      "store": "cat.db",
      "vocabulary": "v.txt",
      "geoTable": "g.tsv",
      "simWebManifest": "m.tsv",
      "scoring": {"completenessWeight": 0.3, "latencyWeight": 0.7,
                  "halfLifeMs": 1500, "sampleWindow": 5},
      "relevanceThreshold": 2
    })";
  }
  auto cfg = AppConfig::load_file(path);
  CHECK(cfg.listen_address == "0.0.0.0");
  CHECK(cfg.port == 9100);
  CHECK(cfg.api_token == "sekrit");
  CHECK(cfg.store_path == "cat.db");
  CHECK(cfg.vocab_path == "v.txt");
  CHECK(cfg.geo_table_path == "g.tsv");
  CHECK(cfg.sim_web_manifest == "m.tsv");
  CHECK(cfg.score_weights.completeness == doctest::Approx(0.3));
  CHECK(cfg.score_weights.latency == doctest::Approx(0.7));
  CHECK(cfg.latency_half_life_ms == doctest::Approx(1500));
  CHECK(cfg.sample_window == 5);
  CHECK(cfg.relevance_threshold == 2);

  setenv("ATMOCAT_PORT", "9200", 1);
  setenv("ATMOCAT_TOKEN", "override", 1);
  setenv("ATMOCAT_THRESHOLD", "3", 1);
  auto cfg2 = AppConfig::load_file(path);
  CHECK(cfg2.port == 9200);
  CHECK(cfg2.api_token == "override");
  CHECK(cfg2.relevance_threshold == 3);
  CHECK(cfg2.listen_address == "0.0.0.0");  // untouched without an override
  unsetenv("ATMOCAT_PORT");
  unsetenv("ATMOCAT_TOKEN");
  unsetenv("ATMOCAT_THRESHOLD");
  std::remove(path.c_str());

  CHECK_THROWS_AS(AppConfig::load_file("no/such/config.json"), std::runtime_error);
}

TEST_CASE("defaults survive a minimal config file") {
  std::string path = "config_min.json";
  {
    std::ofstream out(path);
    out << "{}";
  }
  auto cfg = AppConfig::load_file(path);
  CHECK(cfg.listen_address == "127.0.0.1");
  CHECK(cfg.port == 8080);
  CHECK(cfg.api_token.empty());
  CHECK(cfg.store_path == "atmocat.db");
  CHECK(cfg.relevance_threshold == 1);
  CHECK(cfg.sample_window == 10);
  std::remove(path.c_str());
}

TEST_CASE("shipped serve config parses") {
  auto cfg = AppConfig::load_file(testutil::data_path("../configs/serve.sim.json"));
  CHECK(cfg.sim_web_manifest == "fixtures/web/manifest.tsv");
  CHECK(cfg.vocab_path == "data/gcmd_atmospheric.txt");
  CHECK(cfg.score_weights.completeness + cfg.score_weights.latency ==
        doctest::Approx(1.0));
}
