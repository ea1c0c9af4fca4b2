#include "atmocat/api.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "atmocat/caps.hpp"
#include "atmocat/classify.hpp"
#include "atmocat/cql.hpp"
#include "atmocat/errors.hpp"
#include "atmocat/search.hpp"
#include "atmocat/stats.hpp"
#include "atmocat/url.hpp"

using nlohmann::json;

namespace atmocat {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct ApiError {
  std::string code;  // InvalidParameter | NotFound | OperationNotSupported | Internal
  std::string message;
  std::string locator;
};

int http_status_for(const std::string& code) {
  if (code == "InvalidParameter" || code == "OperationNotSupported") return 400;
  if (code == "NotFound") return 404;
  return 500;
}

void send_error(httplib::Response& res, const ApiError& e) {
  json body{{"code", e.code}, {"message", e.message}};
  if (!e.locator.empty()) body["locator"] = e.locator;
  res.status = http_status_for(e.code);
  res.set_content(json{{"error", body}}.dump(), "application/json");
}

json record_to_json(const CatalogueRecord& r) {
  json j{{"identifier", r.layer.layer_id},
         {"serviceId", r.service.service_id},
         {"title", r.meta.title},
         {"abstract", r.meta.abstract_},
         {"subject", r.meta.keywords},
         {"source", r.service.url},
         {"serviceType", to_string(r.service.service_type)}};
  if (r.layer.bbox)
    j["boundingBox"] = {{"minLon", r.layer.bbox->min_lon},
                        {"minLat", r.layer.bbox->min_lat},
                        {"maxLon", r.layer.bbox->max_lon},
                        {"maxLat", r.layer.bbox->max_lat}};
  return j;
}

std::string record_to_xml(const CatalogueRecord& r) {
  std::ostringstream os;
  os << "    <csw:Record>\n"
     << "      <dc:identifier>" << r.layer.layer_id << "</dc:identifier>\n"
     << "      <dc:title>" << xml_escape(r.meta.title) << "</dc:title>\n"
     << "      <dct:abstract>" << xml_escape(r.meta.abstract_) << "</dct:abstract>\n";
  for (const auto& k : r.meta.keywords)
    os << "      <dc:subject>" << xml_escape(k) << "</dc:subject>\n";
  os << "      <dc:source>" << xml_escape(r.service.url) << "</dc:source>\n";
  if (r.layer.bbox)
    os << "      <ows:BoundingBox><ows:LowerCorner>" << r.layer.bbox->min_lon << " "
       << r.layer.bbox->min_lat << "</ows:LowerCorner><ows:UpperCorner>"
       << r.layer.bbox->max_lon << " " << r.layer.bbox->max_lat
       << "</ows:UpperCorner></ows:BoundingBox>\n";
  os << "    </csw:Record>\n";
  return os.str();
}

const char* kCswCapabilities = R"xml(<?xml version="1.0" encoding="UTF-8"?>
<csw:Capabilities version="2.0.2"
    xmlns:csw="http://www.opengis.net/cat/csw/2.0.2"
    xmlns:ows="http://www.opengis.net/ows">
  <ows:ServiceIdentification>
    <ows:Title>atmocat catalogue</ows:Title>
    <ows:Abstract>Catalogue of crawled atmospheric OGC web services</ows:Abstract>
    <ows:ServiceType>CSW</ows:ServiceType>
    <ows:ServiceTypeVersion>2.0.2</ows:ServiceTypeVersion>
  </ows:ServiceIdentification>
  <ows:OperationsMetadata>
    <ows:Operation name="GetCapabilities"/>
    <ows:Operation name="GetRecords"/>
    <ows:Operation name="GetRecordById"/>
    <ows:Operation name="Harvest"/>
  </ows:OperationsMetadata>
</csw:Capabilities>
)xml";

}  // namespace

struct ApiServer::Impl {
  AppConfig config;
  CatalogueStore& store;
  Transport& transport;
  const Vocabulary& vocab;
  std::shared_ptr<const GeoResolver> geo;
  CrawlManager crawls;
  httplib::Server server;
  std::thread thread;
  int bound_port = 0;

  Impl(const AppConfig& cfg, CatalogueStore& st, Transport& tr, const Vocabulary& vo,
       std::shared_ptr<const GeoResolver> g)
      : config(cfg),
        store(st),
        transport(tr),
        vocab(vo),
        geo(g),
        crawls(tr, st, vo, g, CrawlerConfig{1, 10000, cfg.relevance_threshold}) {
    setup();
  }

  bool authorized(const httplib::Request& req) {
    if (config.api_token.empty()) return true;
    return req.get_header_value("X-Api-Token") == config.api_token;
  }

  bool want_json(const httplib::Request& req) {
    if (req.get_param_value("format") == "json") return true;
    if (req.get_param_value("format") == "xml") return false;
    return req.get_header_value("Accept").find("application/json") != std::string::npos;
  }

  void handle_get_records(const httplib::Request& req, httplib::Response& res) {
    std::string constraint = req.get_param_value("constraint");
    CqlExprPtr expr;
    if (!constraint.empty()) {
      try {
        expr = parse_cql(constraint);
      } catch (const CqlSyntaxError& e) {
        send_error(res, {"InvalidParameter", e.what(), "constraint"});
        return;
      }
    }
    long start = 1, max_records = 10;
    try {
      if (req.has_param("startPosition")) start = std::stol(req.get_param_value("startPosition"));
      if (req.has_param("maxRecords")) max_records = std::stol(req.get_param_value("maxRecords"));
    } catch (...) {
      send_error(res, {"InvalidParameter", "bad paging parameter", "startPosition"});
      return;
    }
    if (start < 1 || max_records < 1) {
      send_error(res, {"InvalidParameter", "paging out of range", "startPosition"});
      return;
    }

    std::vector<CatalogueRecord> matched;
    for (const auto& r : store.list_records())
      if (!expr || evaluate(*expr, to_eval_record(r))) matched.push_back(r);

    std::vector<const CatalogueRecord*> page;
    for (std::size_t i = static_cast<std::size_t>(start - 1);
         i < matched.size() && page.size() < static_cast<std::size_t>(max_records); ++i)
      page.push_back(&matched[i]);

    if (want_json(req)) {
      json records = json::array();
      for (const auto* r : page) records.push_back(record_to_json(*r));
      res.set_content(json{{"numberOfRecordsMatched", matched.size()},
                           {"numberOfRecordsReturned", page.size()},
                           {"records", records}}
                          .dump(),
                      "application/json");
      return;
    }
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<csw:GetRecordsResponse xmlns:csw=\"http://www.opengis.net/cat/csw/2.0.2\" "
          "xmlns:dc=\"http://purl.org/dc/elements/1.1/\" "
          "xmlns:dct=\"http://purl.org/dc/terms/\" "
          "xmlns:ows=\"http://www.opengis.net/ows\">\n"
       << "  <csw:SearchResults numberOfRecordsMatched=\"" << matched.size()
       << "\" numberOfRecordsReturned=\"" << page.size() << "\">\n";
    for (const auto* r : page) os << record_to_xml(*r);
    os << "  </csw:SearchResults>\n</csw:GetRecordsResponse>\n";
    res.set_content(os.str(), "application/xml");
  }

  void handle_csw(const httplib::Request& req, httplib::Response& res) {
    std::string request = req.get_param_value("request");
    if (request == "GetCapabilities" || request.empty()) {
      res.set_content(kCswCapabilities, "application/xml");
      return;
    }
    if (request == "GetRecords") {
      handle_get_records(req, res);
      return;
    }
    if (request == "GetRecordById") {
      std::string id = req.get_param_value("id");
      std::int64_t layer_id = 0;
      try {
        layer_id = std::stoll(id);
      } catch (...) {
        send_error(res, {"InvalidParameter", "id must be numeric", "id"});
        return;
      }
      auto rec = store.find_record(layer_id);
      if (!rec) {
        send_error(res, {"NotFound", "no record with id " + id, "id"});
        return;
      }
      if (want_json(req)) {
        res.set_content(record_to_json(*rec).dump(), "application/json");
      } else {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<csw:GetRecordByIdResponse "
              "xmlns:csw=\"http://www.opengis.net/cat/csw/2.0.2\" "
              "xmlns:dc=\"http://purl.org/dc/elements/1.1/\" "
              "xmlns:dct=\"http://purl.org/dc/terms/\" "
              "xmlns:ows=\"http://www.opengis.net/ows\">\n"
           << record_to_xml(*rec) << "</csw:GetRecordByIdResponse>\n";
        res.set_content(os.str(), "application/xml");
      }
      return;
    }
    send_error(res, {"OperationNotSupported", "unknown request: " + request, "request"});
  }

  // fetch -> parse -> filter -> upsert; shared by POST /harvest
  void handle_harvest(const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) {
      send_error(res, {"NotFound", "authorization required", "X-Api-Token"});
      res.status = 401;
      return;
    }
    std::string url;
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_object() && body.contains("url")) url = body["url"].get<std::string>();
    if (url.empty()) {
      send_error(res, {"InvalidParameter", "body must carry {\"url\": ...}", "url"});
      return;
    }
    HttpResponse fetched;
    try {
      fetched = transport.request(url, 10000);
    } catch (const FetchFailed& e) {
      send_error(res, {"Internal", e.what(), "url"});
      res.status = 502;
      return;
    }
    DocKind kind = classify_response(fetched.content_type, fetched.body);
    if (kind != DocKind::OwsCapabilities) {
      send_error(res, {"InvalidParameter", "url does not serve a capabilities document",
                       "url"});
      return;
    }
    try {
      std::string canon = normalize_url(url);
      auto [svc, layers] = parse_capabilities(fetched.body, canon);
      std::vector<std::string> texts{svc.title, svc.abstract_};
      for (const auto& k : svc.keywords) texts.push_back(k);
      for (const auto& l : layers) {
        texts.push_back(l.title);
        texts.push_back(l.abstract_);
        for (const auto& k : l.keywords) texts.push_back(k);
      }
      auto verdict = score_relevance(texts, vocab, config.relevance_threshold);
      std::int64_t before = store.layer_count();
      bool accepted = verdict.relevant;
      if (accepted) store.upsert_service(svc, geo->resolve(Url::parse(canon).host), layers);
      std::int64_t new_layers = store.layer_count() - before;
      res.set_content(json{{"accepted", accepted ? 1 : 0},
                           {"rejected", accepted ? 0 : 1},
                           {"layerCount", layers.size()},
                           {"newLayers", new_layers}}
                          .dump(),
                      "application/json");
    } catch (const std::exception& e) {
      send_error(res, {"InvalidParameter", e.what(), "url"});
    }
  }

  void handle_search(const httplib::Request& req, httplib::Response& res) {
    SearchQuery q;
    try {
      if (req.has_param("q")) q.free_text = req.get_param_value("q");
      if (req.has_param("cql")) q.cql = parse_cql(req.get_param_value("cql"));
      if (req.has_param("formats")) {
        std::vector<std::string> fmts;
        std::istringstream is(req.get_param_value("formats"));
        std::string f;
        while (std::getline(is, f, ','))
          if (!f.empty()) fmts.push_back(f);
        q.formats = fmts;
      }
      if (req.has_param("bbox")) {
        std::istringstream is(req.get_param_value("bbox"));
        BoundingBox b;
        char c;
        if (!(is >> b.min_lon >> c >> b.min_lat >> c >> b.max_lon >> c >> b.max_lat))
          throw InvalidQuery("bbox must be minLon,minLat,maxLon,maxLat");
        q.bbox = b;
      }
      if (req.has_param("srs")) q.srs = req.get_param_value("srs");
      if (req.has_param("timeStart") || req.has_param("timeEnd"))
        q.time_range = std::make_pair(req.get_param_value("timeStart"),
                                      req.get_param_value("timeEnd"));
      if (req.has_param("offset")) q.offset = std::stoll(req.get_param_value("offset"));
      if (req.has_param("limit")) q.limit = std::stoll(req.get_param_value("limit"));
    } catch (const CqlSyntaxError& e) {
      send_error(res, {"InvalidParameter", e.what(), "cql"});
      return;
    } catch (const std::exception& e) {
      send_error(res, {"InvalidParameter", e.what(), ""});
      return;
    }
    try {
      SearchPage page = search(store, q);
      json results = json::array();
      for (const auto& r : page.results) {
        json item{{"layerId", r.layer_id},     {"serviceId", r.service_id},
                  {"title", r.title},          {"abstract", r.abstract_},
                  {"qualityScore", r.quality_score}, {"matchRank", r.match_rank}};
        item["thumbnailUrl"] =
            r.thumbnail_url.empty() ? json(nullptr) : json(r.thumbnail_url);
        results.push_back(std::move(item));
      }
      res.set_content(
          json{{"total", page.total}, {"offset", page.offset}, {"results", results}}
              .dump(),
          "application/json");
    } catch (const InvalidQuery& e) {
      send_error(res, {"InvalidParameter", e.what(), ""});
    }
  }

  void setup() {
    server.Get("/csw", [this](const httplib::Request& req, httplib::Response& res) {
      handle_csw(req, res);
    });
    server.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      handle_search(req, res);
    });
    server.Get("/stats/countries",
               [this](const httplib::Request&, httplib::Response& res) {
                 auto counts = country_counts(store);
                 auto cls = classify_countries(counts);
                 res.set_content(countries_to_json(counts, cls), "application/json");
               });
    server.Get("/stats/providers",
               [this](const httplib::Request& req, httplib::Response& res) {
                 int n = 10;
                 try {
                   if (req.has_param("n")) n = std::stoi(req.get_param_value("n"));
                 } catch (...) {
                   send_error(res, {"InvalidParameter", "n must be numeric", "n"});
                   return;
                 }
                 if (n < 1) {
                   send_error(res, {"InvalidParameter", "n must be >= 1", "n"});
                   return;
                 }
                 res.set_content(
                     providers_to_json(top_providers(store, n, req.get_param_value("country"))),
                     "application/json");
               });
    server.Post("/harvest", [this](const httplib::Request& req, httplib::Response& res) {
      handle_harvest(req, res);
    });
    server.Post("/crawl", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req)) {
        send_error(res, {"NotFound", "authorization required", "X-Api-Token"});
        res.status = 401;
        return;
      }
      auto body = json::parse(req.body, nullptr, false);
      if (!body.is_object()) {
        send_error(res, {"InvalidParameter", "JSON body required", ""});
        return;
      }
      CrawlTask task;
      for (const auto& s : body.value("seeds", json::array()))
        task.seed_urls.push_back(s.get<std::string>());
      for (const auto& k : body.value("keywords", json::array()))
        task.keywords.push_back(k.get<std::string>());
      task.max_depth = body.value("maxDepth", 3);
      task.max_pages = body.value("maxPages", 100);
      task.per_host_delay_ms = body.value("perHostDelayMs", 1000);
      if (task.seed_urls.empty()) {
        send_error(res, {"InvalidParameter", "seeds (or keywords with a seed provider) "
                         "required", "seeds"});
        return;
      }
      std::string id = crawls.start(std::move(task));
      res.status = 202;
      res.set_content(json{{"taskId", id}}.dump(), "application/json");
    });
    server.Get(R"(/crawl/([\w\-]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 auto st = crawls.status(req.matches[1]);
                 if (!st) {
                   send_error(res, {"NotFound", "unknown task", "taskId"});
                   return;
                 }
                 json errors = json::array();
                 for (const auto& e : st->report.errors)
                   errors.push_back({{"url", e.url}, {"kind", e.kind}});
                 res.set_content(
                     json{{"state", to_string(st->state)},
                          {"pagesVisited", st->report.pages_visited},
                          {"capabilitiesFound", st->report.capabilities_found},
                          {"servicesIngested", st->report.services_ingested},
                          {"servicesRejectedBySemantics",
                           st->report.services_rejected_by_semantics},
                          {"errors", errors}}
                         .dump(),
                     "application/json");
               });
    server.Delete(R"(/crawl/([\w\-]+))",
                  [this](const httplib::Request& req, httplib::Response& res) {
                    if (!authorized(req)) {
                      send_error(res, {"NotFound", "authorization required", "X-Api-Token"});
                      res.status = 401;
                      return;
                    }
                    if (!crawls.cancel(req.matches[1])) {
                      send_error(res, {"NotFound", "unknown task", "taskId"});
                      return;
                    }
                    res.set_content(json{{"cancelled", true}}.dump(), "application/json");
                  });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                    std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        if (ep) std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        msg = e.what();
      }
      send_error(res, {"Internal", msg, ""});
    });
  }
};

ApiServer::ApiServer(const AppConfig& config, CatalogueStore& store, Transport& transport,
                     const Vocabulary& vocab, std::shared_ptr<const GeoResolver> geo)
    : impl_(new Impl(config, store, transport, vocab, std::move(geo))) {}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::start(const std::string& host, int port) {
  if (port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(host);
    if (impl_->bound_port <= 0) return false;
  } else {
    if (!impl_->server.bind_to_port(host, port)) return false;
    impl_->bound_port = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return true;
}

int ApiServer::port() const { return impl_->bound_port; }

void ApiServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_->crawls.wait_all();
}

}  // namespace atmocat
