#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "atmocat/geo.hpp"
#include "atmocat/probes.hpp"
#include "atmocat/store.hpp"
#include "atmocat/transport.hpp"
#include "atmocat/vocab.hpp"

namespace atmocat {

enum class TaskState { Pending, Running, Done, Aborted };
const char* to_string(TaskState s);

struct CrawlTask {
  std::string task_id;
  std::vector<std::string> keywords;
  std::vector<std::string> seed_urls;  // absolute URLs
  int max_depth = 3;
  int max_pages = 100;
  std::int64_t per_host_delay_ms = 1000;
  TaskState state = TaskState::Pending;
};

struct FrontierEntry {
  std::string url;  // canonical form
  int depth = 0;
  std::string discovered_from;  // empty for seeds
};

struct CrawlError {
  std::string url;
  std::string kind;
};

struct CrawlReport {
  std::int64_t pages_visited = 0;
  std::int64_t capabilities_found = 0;
  std::int64_t services_ingested = 0;
  std::int64_t services_rejected_by_semantics = 0;
  std::vector<CrawlError> errors;
};

// Shared crawl frontier: dedup on canonical URL, per-host politeness,
// lowest depth first then FIFO. Push/pop are linearizable.
class Frontier {
 public:
  Frontier(int max_depth, std::int64_t per_host_delay_ms)
      : max_depth_(max_depth), delay_ms_(per_host_delay_ms) {}

  void set_running(bool running);

  // True iff never seen by this task and depth within bound. Throws
  // TaskNotRunning when the frontier is closed to insertion.
  bool push(const FrontierEntry& entry);

  // An entry whose host was last fetched at least the politeness delay
  // before `now`; pops record the fetch time for the entry's host.
  std::optional<FrontierEntry> pop(std::int64_t now);

  // Earliest instant at which some queued entry becomes eligible.
  std::optional<std::int64_t> next_eligible_at(std::int64_t now) const;

  bool empty() const;

 private:
  bool host_ready(const std::string& host, std::int64_t now) const;

  mutable std::mutex mu_;
  int max_depth_;
  std::int64_t delay_ms_;
  bool running_ = true;
  std::set<std::string> seen_;
  std::deque<FrontierEntry> queue_;  // kept sorted by (depth, insertion)
  std::map<std::string, std::int64_t> last_fetch_by_host_;
};

struct CrawlerConfig {
  int workers = 1;
  int fetch_timeout_ms = 10000;
  int relevance_threshold = 1;
  ProbePatterns probe_patterns = ProbePatterns::defaults();
};

// Whole-pipeline crawl: fetch, classify, follow links, probe OWS endpoints,
// parse capabilities, filter semantically, ingest into the catalogue.
// Per-URL failures land in the report, never abort the task.
CrawlReport run_crawl(CrawlTask& task, Transport& transport, Clock& clock,
                      CatalogueStore& store, const Vocabulary& vocab,
                      const GeoResolver& geo, const CrawlerConfig& config = {},
                      const std::function<bool()>& cancelled = {});

// Seed sources are pluggable: the paper-style search-engine redirect is not
// reproducible, so seeds come from files or canned providers.
class SeedProvider {
 public:
  virtual ~SeedProvider() = default;
  virtual std::vector<std::string> seeds_for(const std::vector<std::string>& keywords) = 0;
};

class FileSeedProvider : public SeedProvider {
 public:
  explicit FileSeedProvider(std::string path) : path_(std::move(path)) {}
  std::vector<std::string> seeds_for(const std::vector<std::string>&) override;

 private:
  std::string path_;
};

class CannedSeedProvider : public SeedProvider {
 public:
  void set(const std::string& keyword, std::vector<std::string> urls);
  std::vector<std::string> seeds_for(const std::vector<std::string>& keywords) override;

 private:
  std::map<std::string, std::vector<std::string>> canned_;
};

// UTF-8 seed file, one absolute URL per line, '#' comments.
std::vector<std::string> read_seed_file(const std::string& path);

// Background crawl-task registry backing the API's crawl-control routes.
class CrawlManager {
 public:
  CrawlManager(Transport& transport, CatalogueStore& store, const Vocabulary& vocab,
               std::shared_ptr<const GeoResolver> geo, CrawlerConfig config = {});
  ~CrawlManager();

  std::string start(CrawlTask task);
  struct Status {
    TaskState state;
    CrawlReport report;
  };
  std::optional<Status> status(const std::string& task_id) const;
  bool cancel(const std::string& task_id);
  void wait_all();

 private:
  struct Job;
  Transport& transport_;
  CatalogueStore& store_;
  const Vocabulary& vocab_;
  std::shared_ptr<const GeoResolver> geo_;
  CrawlerConfig config_;
  SystemClock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  int next_id_ = 1;
};

}  // namespace atmocat
