#include <doctest.h>

#include <chrono>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "atmocat/api.hpp"
#include "test_util.hpp"

using namespace atmocat;
using nlohmann::json;

namespace {

const char* kOzoneWms =
    "<WMS_Capabilities version='1.3.0' xmlns='http://www.opengis.net/wms'>"
    "<Service><Name>WMS</Name><Title>Ozone WMS</Title>"
    "<Abstract>Total column ozone maps</Abstract></Service>"
    "<Capability><Layer><Title>root</Title><CRS>EPSG:4326</CRS>"
    "<Layer><Name>o3</Name><Title>Total Ozone</Title>"
    "<Abstract>Column ozone</Abstract></Layer>"
    "</Layer></Capability></WMS_Capabilities>";

struct TestApi {
  CatalogueStore store{":memory:"};
  SimulatedWeb web;
  Vocabulary vocab;
  AppConfig cfg;
  std::unique_ptr<ApiServer> server;

  explicit TestApi(const std::string& token = "") {
    std::istringstream terms("ozone\nsea surface temperature\n");
    vocab = load_vocabulary(terms, "test");
    cfg.api_token = token;
    server = std::make_unique<ApiServer>(cfg, store, web, vocab,
                                         TableGeoResolver::builtin());
    REQUIRE(server->start("127.0.0.1", 0));
  }

  ~TestApi() { server->stop(); }

  httplib::Client client() {
    httplib::Client c("127.0.0.1", server->port());
    c.set_connection_timeout(5);
    c.set_read_timeout(5);
    return c;
  }

  std::int64_t seed_layers() {
    ServiceDraft svc;
    svc.service_type = ServiceType::WMS;
    svc.version = "1.3.0";
    svc.title = "Ozone WMS";
    svc.capabilities_url = "http://caps.test/wms";
    LayerDraft o3;
    o3.name = "o3";
    o3.title = "Total Ozone";
    o3.abstract_ = "Column ozone";
    o3.keywords = {"ozone"};
    o3.bbox = BoundingBox{-180, -90, 180, 90};
    LayerDraft aux;
    aux.name = "aux";
    aux.title = "Auxiliary Mask";
    return store.upsert_service(svc, {0, 0, "us"}, {o3, aux});
  }
};

json get_json(httplib::Client& cli, const std::string& path,
              const httplib::Params& params = {}) {
  auto res = cli.Get(path, params, httplib::Headers{});
  REQUIRE(res);
  return json::parse(res->body);
}

}  // namespace

TEST_CASE("csw GetCapabilities is stable xml") {
  TestApi api;
  auto cli = api.client();
  auto a = cli.Get("/csw?request=GetCapabilities");
  auto b = cli.Get("/csw");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->status == 200);
  CHECK(a->body == b->body);  // byte-identical across requests
  CHECK(a->get_header_value("Content-Type").find("application/xml") == 0);
  CHECK(a->body.find("<csw:Capabilities") != std::string::npos);
  CHECK(a->body.find("version=\"2.0.2\"") != std::string::npos);
  for (const char* op : {"GetCapabilities", "GetRecords", "GetRecordById", "Harvest"})
    CHECK(a->body.find(std::string("name=\"") + op + "\"") != std::string::npos);
}

TEST_CASE("csw GetRecords: constraint, paging, xml and json agree") {
  TestApi api;
  api.seed_layers();
  auto cli = api.client();

  auto all = cli.Get("/csw", {{"request", "GetRecords"}}, httplib::Headers{});
  REQUIRE(all);
  CHECK(all->status == 200);
  CHECK(all->body.find("numberOfRecordsMatched=\"2\"") != std::string::npos);
  CHECK(all->body.find("<dc:title>Total Ozone</dc:title>") != std::string::npos);

  auto j = get_json(cli, "/csw",
                    {{"request", "GetRecords"},
                     {"constraint", "AnyText LIKE '%ozone%'"},
                     {"format", "json"}});
  CHECK(j.at("numberOfRecordsMatched") == 1);
  REQUIRE(j.at("records").size() == 1);
  CHECK(j["records"][0]["title"] == "Total Ozone");
  CHECK(j["records"][0]["source"] == "http://caps.test/wms");

  auto page = get_json(cli, "/csw",
                       {{"request", "GetRecords"},
                        {"startPosition", "2"},
                        {"maxRecords", "1"},
                        {"format", "json"}});
  CHECK(page["numberOfRecordsMatched"] == 2);
  CHECK(page["numberOfRecordsReturned"] == 1);

  auto bad = cli.Get("/csw", {{"request", "GetRecords"}, {"constraint", "title LIKE"}},
                     httplib::Headers{});
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto err = json::parse(bad->body);
  CHECK(err["error"]["code"] == "InvalidParameter");
  CHECK(err["error"]["locator"] == "constraint");
  CHECK(err["error"]["message"].get<std::string>().find("position") != std::string::npos);

  auto badpage = cli.Get("/csw", {{"request", "GetRecords"}, {"startPosition", "0"}},
                         httplib::Headers{});
  REQUIRE(badpage);
  CHECK(badpage->status == 400);
}

TEST_CASE("csw GetRecordById and unsupported operations") {
  TestApi api;
  api.seed_layers();
  auto cli = api.client();
  auto records = get_json(cli, "/csw", {{"request", "GetRecords"}, {"format", "json"}});
  auto id = records["records"][0]["identifier"].get<std::int64_t>();

  auto j = get_json(cli, "/csw",
                    {{"request", "GetRecordById"},
                     {"id", std::to_string(id)},
                     {"format", "json"}});
  CHECK(j["identifier"] == id);

  auto xml = cli.Get("/csw", {{"request", "GetRecordById"}, {"id", std::to_string(id)}},
                     httplib::Headers{});
  REQUIRE(xml);
  CHECK(xml->body.find("<csw:Record>") != std::string::npos);
  CHECK(xml->body.find("<dc:identifier>" + std::to_string(id) + "</dc:identifier>") !=
        std::string::npos);

  auto missing = cli.Get("/csw", {{"request", "GetRecordById"}, {"id", "99999"}},
                         httplib::Headers{});
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"]["code"] == "NotFound");

  auto nonnum = cli.Get("/csw", {{"request", "GetRecordById"}, {"id", "abc"}},
                        httplib::Headers{});
  REQUIRE(nonnum);
  CHECK(nonnum->status == 400);

  auto unknown = cli.Get("/csw", {{"request", "Transaction"}}, httplib::Headers{});
  REQUIRE(unknown);
  CHECK(unknown->status == 400);
  CHECK(json::parse(unknown->body)["error"]["code"] == "OperationNotSupported");
}

TEST_CASE("search endpoint schema and validation") {
  TestApi api;
  api.seed_layers();
  auto cli = api.client();

  auto j = get_json(cli, "/search", {{"q", "ozone"}});
  CHECK(j["total"] == 1);
  CHECK(j["offset"] == 0);
  REQUIRE(j["results"].size() == 1);
  const auto& r = j["results"][0];
  for (const char* key :
       {"layerId", "serviceId", "title", "abstract", "qualityScore", "matchRank",
        "thumbnailUrl"})
    CHECK(r.contains(key));
  CHECK(r["title"] == "Total Ozone");
  CHECK(r["thumbnailUrl"].is_string());  // wms layer with a bbox gets a GetMap url

  auto all = get_json(cli, "/search");
  CHECK(all["total"] == 2);

  auto offset = get_json(cli, "/search", {{"offset", "10"}});
  CHECK(offset["total"] == 2);
  CHECK(offset["results"].empty());

  auto bad_limit = cli.Get("/search", {{"limit", "0"}}, httplib::Headers{});
  REQUIRE(bad_limit);
  CHECK(bad_limit->status == 400);

  auto bad_cql = cli.Get("/search", {{"cql", "title ="}}, httplib::Headers{});
  REQUIRE(bad_cql);
  CHECK(bad_cql->status == 400);
  CHECK(json::parse(bad_cql->body)["error"]["locator"] == "cql");

  auto cql = get_json(cli, "/search", {{"cql", "name = 'aux'"}});
  CHECK(cql["total"] == 1);
  CHECK(cql["results"][0]["title"] == "Auxiliary Mask");
}

TEST_CASE("stats endpoints") {
  TestApi api;
  api.seed_layers();
  auto cli = api.client();

  auto countries = get_json(cli, "/stats/countries");
  std::int64_t sum = 0;
  for (const auto& row : countries["countries"]) sum += row["count"].get<std::int64_t>();
  CHECK(sum == api.store.service_count());

  auto provs = get_json(cli, "/stats/providers", {{"n", "5"}});
  CHECK(provs.contains("providers"));

  auto bad_n = cli.Get("/stats/providers", {{"n", "0"}}, httplib::Headers{});
  REQUIRE(bad_n);
  CHECK(bad_n->status == 400);
  auto nan = cli.Get("/stats/providers", {{"n", "xyz"}}, httplib::Headers{});
  REQUIRE(nan);
  CHECK(nan->status == 400);
}

TEST_CASE("harvest: accept, reject, idempotence, classification, auth") {
  TestApi api("tok-1");
  api.web.add("http://caps.test/endpoint?request=GetCapabilities&service=WMS", 200,
              "application/xml", kOzoneWms);
  api.web.add("http://caps.test/page.html", 200, "text/html", "<html>hi</html>");
  api.web.add_timeout("http://down.test/wms");
  auto cli = api.client();
  httplib::Headers auth{{"X-Api-Token", "tok-1"}};

  auto body =
      json{{"url", "http://caps.test/endpoint?request=GetCapabilities&service=WMS"}}
          .dump();
  auto denied = cli.Post("/harvest", body, "application/json");
  REQUIRE(denied);
  CHECK(denied->status == 401);

  auto ok = cli.Post("/harvest", auth, body, "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  auto j = json::parse(ok->body);
  CHECK(j["accepted"] == 1);
  CHECK(j["layerCount"] == 1);
  CHECK(j["newLayers"] == 1);
  CHECK(api.store.service_count() == 1);

  auto again = cli.Post("/harvest", auth, body, "application/json");
  REQUIRE(again);
  CHECK(json::parse(again->body)["newLayers"] == 0);  // idempotent
  CHECK(api.store.service_count() == 1);

  auto notcaps = cli.Post("/harvest", auth,
                          json{{"url", "http://caps.test/page.html"}}.dump(),
                          "application/json");
  REQUIRE(notcaps);
  CHECK(notcaps->status == 400);
  CHECK(json::parse(notcaps->body)["error"]["locator"] == "url");

  auto down = cli.Post("/harvest", auth, json{{"url", "http://down.test/wms"}}.dump(),
                       "application/json");
  REQUIRE(down);
  CHECK(down->status == 502);

  auto nourl = cli.Post("/harvest", auth, "{}", "application/json");
  REQUIRE(nourl);
  CHECK(nourl->status == 400);
}

TEST_CASE("crawl routes drive a background task") {
  TestApi api;
  api.web.add("http://a.test/", 200, "text/html",
              "<html><a href='http://caps.test/endpoint?service=WMS&"
              "request=GetCapabilities'>w</a></html>");
  api.web.add("http://caps.test/endpoint?request=GetCapabilities&service=WMS", 200,
              "application/xml", kOzoneWms);
  auto cli = api.client();

  auto noseeds = cli.Post("/crawl", "{}", "application/json");
  REQUIRE(noseeds);
  CHECK(noseeds->status == 400);

  auto started = cli.Post(
      "/crawl",
      json{{"seeds", {"http://a.test/"}}, {"perHostDelayMs", 0}, {"maxPages", 10}}
          .dump(),
      "application/json");
  REQUIRE(started);
  CHECK(started->status == 202);
  auto id = json::parse(started->body)["taskId"].get<std::string>();
  CHECK(id.rfind("task-", 0) == 0);

  json status;
  for (int i = 0; i < 500; ++i) {
    auto res = cli.Get(("/crawl/" + id).c_str());
    REQUIRE(res);
    status = json::parse(res->body);
    if (status["state"] == "done") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(status["state"] == "done");
  CHECK(status["pagesVisited"] == 2);
  CHECK(status["capabilitiesFound"] == 1);
  CHECK(status["servicesIngested"] == 1);
  CHECK(status["errors"].empty());
  CHECK(api.store.service_count() == 1);

  auto missing = cli.Get("/crawl/task-999");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto del = cli.Delete("/crawl/task-999");
  REQUIRE(del);
  CHECK(del->status == 404);
  auto cancel = cli.Delete(("/crawl/" + id).c_str());
  REQUIRE(cancel);
  CHECK(cancel->status == 200);
}

TEST_CASE("search and csw agree on identifiers") {
  TestApi api;
  api.seed_layers();
  auto cli = api.client();
  auto via_search = get_json(cli, "/search");
  auto via_csw = get_json(cli, "/csw", {{"request", "GetRecords"}, {"format", "json"}});
  std::set<std::int64_t> a, b;
  for (const auto& r : via_search["results"]) a.insert(r["layerId"].get<std::int64_t>());
  for (const auto& r : via_csw["records"]) b.insert(r["identifier"].get<std::int64_t>());
  CHECK(a == b);
}
