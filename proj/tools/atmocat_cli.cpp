// atmocat command-line driver. Thin wrappers over the core modules; all
// catalogue behaviour reachable here is also covered by module-level tests.
#include <csignal>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "atmocat/api.hpp"
#include "atmocat/caps.hpp"
#include "atmocat/classify.hpp"
#include "atmocat/config.hpp"
#include "atmocat/cql.hpp"
#include "atmocat/crawler.hpp"
#include "atmocat/errors.hpp"
#include "atmocat/geo.hpp"
#include "atmocat/search.hpp"
#include "atmocat/stats.hpp"
#include "atmocat/store.hpp"
#include "atmocat/transport.hpp"
#include "atmocat/url.hpp"
#include "atmocat/vocab.hpp"

using nlohmann::json;
using namespace atmocat;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::shared_ptr<Transport> make_transport(const std::string& sim_manifest) {
  if (!sim_manifest.empty()) return SimulatedWeb::load_manifest(sim_manifest);
  return std::make_shared<NetworkTransport>();
}

Vocabulary load_vocab_or_builtin(const std::string& path) {
  if (!path.empty()) return load_vocabulary_file(path);
  // Minimal fallback so the tool works without a vocabulary file.
  std::istringstream core(
      "temperature\nprecipitation\nhumidity\nwind\npressure\n"
      "aerosol\nozone\nradiation\nclimate\natmospheric\n"
      "sea surface temperature\nsst\nweather\ncloud\n");
  return load_vocabulary(core, "builtin");
}

std::shared_ptr<const GeoResolver> load_geo(const std::string& path) {
  if (!path.empty()) return TableGeoResolver::load_file(path);
  return TableGeoResolver::builtin();
}

json report_to_json(const CrawlReport& r) {
  json errors = json::array();
  for (const auto& e : r.errors) errors.push_back({{"url", e.url}, {"kind", e.kind}});
  return json{{"pagesVisited", r.pages_visited},
              {"capabilitiesFound", r.capabilities_found},
              {"servicesIngested", r.services_ingested},
              {"servicesRejectedBySemantics", r.services_rejected_by_semantics},
              {"errors", errors}};
}

int cmd_crawl(const std::string& seeds_file, const std::vector<std::string>& keywords,
              int max_depth, int max_pages, std::int64_t delay_ms,
              const std::string& vocab_path, const std::string& store_path,
              const std::string& geo_path, const std::string& sim_manifest,
              int threshold, bool as_json) {
  CrawlTask task;
  task.keywords = keywords;
  task.max_depth = max_depth;
  task.max_pages = max_pages;
  task.per_host_delay_ms = delay_ms;
  if (!seeds_file.empty()) {
    task.seed_urls = read_seed_file(seeds_file);
  } else {
    // No external search-engine seed provider is wired in; keywords alone
    // cannot produce seeds here.
    std::cerr << "crawl: --seeds required (keywords need a seed provider)\n";
    return kUsage;
  }

  CatalogueStore store(store_path);
  auto transport = make_transport(sim_manifest);
  Vocabulary vocab = load_vocab_or_builtin(vocab_path);
  auto geo = load_geo(geo_path);
  SystemClock clock;
  CrawlerConfig cfg;
  cfg.relevance_threshold = threshold;
  CrawlReport report = run_crawl(task, *transport, clock, store, vocab, *geo, cfg);

  if (as_json) {
    std::cout << report_to_json(report).dump(2) << "\n";
  } else {
    std::cout << "pages visited:       " << report.pages_visited << "\n"
              << "capabilities found:  " << report.capabilities_found << "\n"
              << "services ingested:   " << report.services_ingested << "\n"
              << "rejected (semantic): " << report.services_rejected_by_semantics << "\n"
              << "errors:              " << report.errors.size() << "\n";
    for (const auto& e : report.errors)
      std::cout << "  " << e.kind << "  " << e.url << "\n";
  }
  return kOk;  // an empty catalogue is not a failure
}

int cmd_harvest(const std::string& url, const std::string& vocab_path,
                const std::string& store_path, const std::string& geo_path,
                const std::string& sim_manifest, int threshold, bool as_json) {
  CatalogueStore store(store_path);
  auto transport = make_transport(sim_manifest);
  Vocabulary vocab = load_vocab_or_builtin(vocab_path);
  auto geo = load_geo(geo_path);

  HttpResponse resp = transport->request(url, 10000);
  if (classify_response(resp.content_type, resp.body) != DocKind::OwsCapabilities)
    throw NotCapabilities("url does not serve a capabilities document: " + url);

  std::string canon = normalize_url(url);
  auto [svc, layers] = parse_capabilities(resp.body, canon);
  std::vector<std::string> texts{svc.title, svc.abstract_};
  for (const auto& k : svc.keywords) texts.push_back(k);
  for (const auto& l : layers) {
    texts.push_back(l.title);
    texts.push_back(l.abstract_);
    for (const auto& k : l.keywords) texts.push_back(k);
  }
  auto verdict = score_relevance(texts, vocab, threshold);
  std::int64_t before = store.layer_count();
  if (verdict.relevant) store.upsert_service(svc, geo->resolve(Url::parse(canon).host), layers);
  std::int64_t new_layers = store.layer_count() - before;

  if (as_json) {
    std::cout << json{{"accepted", verdict.relevant ? 1 : 0},
                      {"rejected", verdict.relevant ? 0 : 1},
                      {"layerCount", layers.size()},
                      {"newLayers", new_layers}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << (verdict.relevant ? "accepted" : "rejected (not relevant)") << ", "
              << layers.size() << " layers (" << new_layers << " new)\n";
  }
  return kOk;
}

int cmd_search(const std::string& q, const std::string& cql, std::int64_t offset,
               std::int64_t limit, const std::string& store_path,
               const std::string& format) {
  SearchQuery query;
  if (!q.empty()) query.free_text = q;
  if (!cql.empty()) {
    try {
      query.cql = parse_cql(cql);
    } catch (const CqlSyntaxError& e) {
      std::cerr << "search: bad --cql: " << e.what() << "\n";
      return kUsage;
    }
  }
  query.offset = offset;
  query.limit = limit;

  CatalogueStore store(store_path);
  SearchPage page = search(store, query);

  if (format == "json") {
    json results = json::array();
    for (const auto& r : page.results) {
      json item{{"layerId", r.layer_id},     {"serviceId", r.service_id},
                {"title", r.title},          {"abstract", r.abstract_},
                {"qualityScore", r.quality_score}, {"matchRank", r.match_rank}};
      item["thumbnailUrl"] = r.thumbnail_url.empty() ? json(nullptr) : json(r.thumbnail_url);
      results.push_back(std::move(item));
    }
    std::cout << json{{"total", page.total}, {"offset", page.offset}, {"results", results}}
                     .dump(2)
              << "\n";
  } else {
    for (const auto& r : page.results)
      std::cout << r.layer_id << "\t" << r.title << "\t" << r.quality_score << "\t"
                << r.match_rank << "\n";
    std::cerr << page.results.size() << " of " << page.total << " matches\n";
  }
  return kOk;
}

int cmd_stats(bool countries, int providers_n, const std::string& country,
              const std::string& store_path, const std::string& format) {
  CatalogueStore store(store_path);
  if (countries) {
    auto counts = country_counts(store);
    auto cls = classify_countries(counts);
    std::cout << (format == "json" ? countries_to_json(counts, cls)
                                   : countries_to_csv(counts, cls));
    if (format == "json") std::cout << "\n";
  } else {
    auto providers = top_providers(store, providers_n, country);
    std::cout << (format == "json" ? providers_to_json(providers)
                                   : providers_to_csv(providers));
    if (format == "json") std::cout << "\n";
  }
  return kOk;
}

std::function<void()> g_stop;
void handle_signal(int) {
  if (g_stop) g_stop();
}

int cmd_serve(const std::string& config_path) {
  AppConfig config = config_path.empty() ? AppConfig{} : AppConfig::load_file(config_path);
  if (config_path.empty()) config.apply_env_overrides();

  CatalogueStore store(config.store_path);
  auto transport = make_transport(config.sim_web_manifest);
  Vocabulary vocab = load_vocab_or_builtin(config.vocab_path);
  auto geo = load_geo(config.geo_table_path);

  ApiServer server(config, store, *transport, vocab, geo);
  if (!server.start(config.listen_address, config.port)) {
    std::cerr << "serve: cannot bind " << config.listen_address << ":" << config.port << "\n";
    return kFailure;
  }
  std::cerr << "listening on " << config.listen_address << ":" << server.port() << "\n";

  std::mutex mu;
  std::condition_variable cv;
  bool stop = false;
  g_stop = [&] {
    std::lock_guard<std::mutex> lk(mu);
    stop = true;
    cv.notify_all();
  };
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::unique_lock<std::mutex> lk(mu);
  cv.wait(lk, [&] { return stop; });
  server.stop();
  return kOk;
}

int cmd_workspace(const std::string& action, const std::string& store_path,
                  const std::string& user, const std::string& name,
                  const std::string& srs, std::int64_t workspace_id,
                  std::int64_t layer_id, int display_order) {
  CatalogueStore store(store_path);
  if (action == "create") {
    if (!store.find_user(user)) {
      // CLI-owned account: registered on demand with a throwaway password.
      std::random_device rd;
      std::ostringstream pw;
      pw << std::hex << rd() << rd() << rd() << rd();
      store.register_user(user, user, "", pw.str());
    }
    std::int64_t id = store.create_workspace(user, name, srs);
    std::cout << json{{"workspaceId", id}}.dump() << "\n";
  } else if (action == "add-layer") {
    store.add_layer_to_workspace(workspace_id, layer_id, display_order);
    std::cout << store.serialize_workspace(workspace_id) << "\n";
  } else if (action == "remove-layer") {
    store.remove_layer_from_workspace(workspace_id, layer_id);
    std::cout << store.serialize_workspace(workspace_id) << "\n";
  } else {  // show
    std::cout << store.serialize_workspace(workspace_id) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atmocat: focused OGC-service crawler and catalogue"};
  app.require_subcommand(1);

  std::string store_path = "atmocat.db";
  app.add_option("--store", store_path, "catalogue database path")->capture_default_str();

  // crawl
  std::string seeds_file, vocab_path, geo_path, sim_manifest;
  std::vector<std::string> keywords;
  int max_depth = 3, max_pages = 100, threshold = 1;
  std::int64_t delay_ms = 1000;
  bool crawl_json = false;
  auto* crawl = app.add_subcommand("crawl", "run a focused crawl");
  crawl->add_option("--seeds", seeds_file, "seed URL file");
  crawl->add_option("--keywords", keywords, "topic keywords");
  crawl->add_option("--max-depth", max_depth, "link depth bound")->capture_default_str();
  crawl->add_option("--max-pages", max_pages, "page budget")->capture_default_str();
  crawl->add_option("--delay-ms", delay_ms, "per-host politeness delay")->capture_default_str();
  crawl->add_option("--vocab", vocab_path, "vocabulary file");
  crawl->add_option("--geo-table", geo_path, "host-suffix geolocation table");
  crawl->add_option("--sim-web", sim_manifest, "simulated-web manifest (testing)");
  crawl->add_option("--threshold", threshold, "relevance threshold")->capture_default_str();
  crawl->add_flag("--json", crawl_json, "JSON report");

  // harvest
  std::string harvest_url;
  bool harvest_json = false;
  auto* harvest = app.add_subcommand("harvest", "ingest one capabilities URL");
  harvest->add_option("url", harvest_url, "capabilities URL")->required();
  harvest->add_option("--vocab", vocab_path, "vocabulary file");
  harvest->add_option("--geo-table", geo_path, "host-suffix geolocation table");
  harvest->add_option("--sim-web", sim_manifest, "simulated-web manifest (testing)");
  harvest->add_option("--threshold", threshold, "relevance threshold");
  harvest->add_flag("--json", harvest_json, "JSON summary");

  // search
  std::string q_text, cql_text, search_format = "table";
  std::int64_t offset = 0, limit = 50;
  auto* search_cmd = app.add_subcommand("search", "query the catalogue");
  search_cmd->add_option("--q", q_text, "free-text query");
  search_cmd->add_option("--cql", cql_text, "CQL constraint");
  search_cmd->add_option("--offset", offset, "paging offset");
  search_cmd->add_option("--limit", limit, "page size");
  search_cmd->add_option("--format", search_format, "table|json")
      ->check(CLI::IsMember({"table", "json"}));

  // stats
  bool stats_countries = false;
  int providers_n = 0;
  std::string country_filter, stats_format = "csv";
  auto* stats_cmd = app.add_subcommand("stats", "export catalogue statistics");
  stats_cmd->add_flag("--countries", stats_countries, "per-country service counts");
  stats_cmd->add_option("--providers", providers_n, "top-N providers");
  stats_cmd->add_option("--country", country_filter, "country filter for --providers");
  stats_cmd->add_option("--format", stats_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // serve
  std::string config_path;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--config", config_path, "JSON config file");

  // workspace
  std::string ws_action, ws_user, ws_name, ws_srs = "EPSG:4326";
  std::int64_t ws_id = 0, ws_layer = 0;
  int ws_order = 0;
  auto* ws = app.add_subcommand("workspace", "manage user workspaces");
  ws->add_option("action", ws_action, "create|add-layer|remove-layer|show")
      ->required()
      ->check(CLI::IsMember({"create", "add-layer", "remove-layer", "show"}));
  ws->add_option("--user", ws_user, "owner email");
  ws->add_option("--name", ws_name, "workspace name");
  ws->add_option("--srs", ws_srs, "default SRS")->capture_default_str();
  ws->add_option("--id", ws_id, "workspace id");
  ws->add_option("--layer", ws_layer, "layer id");
  ws->add_option("--order", ws_order, "display order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (crawl->parsed()) {
      if (seeds_file.empty() && keywords.empty()) {
        std::cerr << "crawl: one of --seeds or --keywords is required\n";
        return kUsage;
      }
      return cmd_crawl(seeds_file, keywords, max_depth, max_pages, delay_ms, vocab_path,
                       store_path, geo_path, sim_manifest, threshold, crawl_json);
    }
    if (harvest->parsed())
      return cmd_harvest(harvest_url, vocab_path, store_path, geo_path, sim_manifest,
                         threshold, harvest_json);
    if (search_cmd->parsed())
      return cmd_search(q_text, cql_text, offset, limit, store_path, search_format);
    if (stats_cmd->parsed()) {
      if (!stats_countries && providers_n <= 0) {
        std::cerr << "stats: one of --countries or --providers N is required\n";
        return kUsage;
      }
      return cmd_stats(stats_countries, providers_n, country_filter, store_path,
                       stats_format);
    }
    if (serve->parsed()) return cmd_serve(config_path);
    if (ws->parsed()) {
      if (ws_action == "create" && (ws_user.empty() || ws_name.empty())) {
        std::cerr << "workspace create: --user and --name are required\n";
        return kUsage;
      }
      if (ws_action != "create" && ws_id == 0) {
        std::cerr << "workspace " << ws_action << ": --id is required\n";
        return kUsage;
      }
      return cmd_workspace(ws_action, store_path, ws_user, ws_name, ws_srs, ws_id,
                           ws_layer, ws_order);
    }
  } catch (const InvalidQuery& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
