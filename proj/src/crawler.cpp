#include "atmocat/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>

#include "atmocat/caps.hpp"
#include "atmocat/classify.hpp"
#include "atmocat/errors.hpp"
#include "atmocat/html.hpp"
#include "atmocat/url.hpp"

namespace atmocat {

const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::Pending: return "pending";
    case TaskState::Running: return "running";
    case TaskState::Done: return "done";
    case TaskState::Aborted: return "aborted";
  }
  return "pending";
}

void Frontier::set_running(bool running) {
  std::lock_guard lk(mu_);
  running_ = running;
}

bool Frontier::push(const FrontierEntry& entry) {
  std::lock_guard lk(mu_);
  if (!running_) throw TaskNotRunning("frontier is closed");
  if (entry.depth > max_depth_) return false;
  if (!seen_.insert(entry.url).second) return false;
  // keep the queue ordered by depth, FIFO within a depth
  auto it = std::find_if(queue_.begin(), queue_.end(),
                         [&](const FrontierEntry& e) { return e.depth > entry.depth; });
  queue_.insert(it, entry);
  return true;
}

bool Frontier::host_ready(const std::string& host, std::int64_t now) const {
  auto it = last_fetch_by_host_.find(host);
  return it == last_fetch_by_host_.end() || now - it->second >= delay_ms_;
}

std::optional<FrontierEntry> Frontier::pop(std::int64_t now) {
  std::lock_guard lk(mu_);
  for (auto it = queue_.begin(); it != queue_.end(); ++it) {
    std::string host;
    try {
      host = Url::parse(it->url).host_port();
    } catch (const MalformedUrl&) {
      host = it->url;
    }
    if (!host_ready(host, now)) continue;
    FrontierEntry e = *it;
    queue_.erase(it);
    last_fetch_by_host_[host] = now;
    return e;
  }
  return std::nullopt;
}

std::optional<std::int64_t> Frontier::next_eligible_at(std::int64_t now) const {
  std::lock_guard lk(mu_);
  std::optional<std::int64_t> best;
  for (const auto& e : queue_) {
    std::string host;
    try {
      host = Url::parse(e.url).host_port();
    } catch (const MalformedUrl&) {
      host = e.url;
    }
    auto it = last_fetch_by_host_.find(host);
    std::int64_t at = (it == last_fetch_by_host_.end()) ? now : it->second + delay_ms_;
    if (at < now) at = now;
    if (!best || at < *best) best = at;
  }
  return best;
}

bool Frontier::empty() const {
  std::lock_guard lk(mu_);
  return queue_.empty();
}

namespace {

struct CrawlShared {
  std::mutex mu;
  CrawlReport report;
  int visited = 0;
  int in_flight = 0;
  bool budget_left(int max_pages) const { return visited < max_pages; }
};

std::vector<std::string> relevance_texts(const ServiceDraft& svc,
                                         const std::vector<LayerDraft>& layers) {
  std::vector<std::string> texts{svc.title, svc.abstract_};
  for (const auto& k : svc.keywords) texts.push_back(k);
  for (const auto& l : layers) {
    texts.push_back(l.title);
    texts.push_back(l.abstract_);
    for (const auto& k : l.keywords) texts.push_back(k);
  }
  return texts;
}

void push_with_probes(Frontier& frontier, const std::string& url, int depth,
                      const std::string& from, const ProbePatterns& patterns) {
  frontier.push({url, depth, from});
  for (const auto& probe : derive_ows_probes(url, patterns))
    frontier.push({probe, depth, from});
}

void process_response(const FrontierEntry& entry, const HttpResponse& resp,
                      Frontier& frontier, CrawlShared& shared, CatalogueStore& store,
                      const Vocabulary& vocab, const GeoResolver& geo,
                      const CrawlerConfig& config, int max_depth) {
  if (resp.status >= 400) {
    std::lock_guard lk(shared.mu);
    shared.report.errors.push_back({entry.url, "http-" + std::to_string(resp.status)});
    return;
  }
  DocKind kind =
      classify_response(resp.content_type,
                        std::string_view(resp.body).substr(
                            0, std::min<std::size_t>(resp.body.size(), 4096)));
  switch (kind) {
    case DocKind::Html: {
      if (entry.depth >= max_depth) break;
      for (const auto& link : extract_links(resp.body, entry.url))
        push_with_probes(frontier, link, entry.depth + 1, entry.url,
                         config.probe_patterns);
      break;
    }
    case DocKind::OwsCapabilities: {
      {
        std::lock_guard lk(shared.mu);
        ++shared.report.capabilities_found;
      }
      try {
        auto [svc, layers] = parse_capabilities(resp.body, entry.url);
        auto verdict = score_relevance(relevance_texts(svc, layers), vocab,
                                       config.relevance_threshold);
        if (verdict.relevant) {
          GeoLocation loc = geo.resolve(Url::parse(entry.url).host);
          store.upsert_service(svc, loc, layers);
          std::lock_guard lk(shared.mu);
          ++shared.report.services_ingested;
        } else {
          std::lock_guard lk(shared.mu);
          ++shared.report.services_rejected_by_semantics;
        }
      } catch (const std::exception& e) {
        std::lock_guard lk(shared.mu);
        shared.report.errors.push_back({entry.url, std::string("parse: ") + e.what()});
      }
      break;
    }
    case DocKind::OwsException: {
      std::lock_guard lk(shared.mu);
      shared.report.errors.push_back({entry.url, "ows-exception"});
      break;
    }
    case DocKind::Other:
      break;
  }
}

void crawl_worker(Frontier& frontier, CrawlShared& shared, Transport& transport,
                  Clock& clock, CatalogueStore& store, const Vocabulary& vocab,
                  const GeoResolver& geo, const CrawlerConfig& config,
                  const CrawlTask& task, const std::function<bool()>& cancelled,
                  std::atomic<bool>& stop) {
  while (!stop.load()) {
    if (cancelled && cancelled()) {
      stop.store(true);
      break;
    }
    FrontierEntry entry;
    {
      std::lock_guard lk(shared.mu);
      if (!shared.budget_left(task.max_pages)) break;
    }
    std::int64_t now = clock.now_ms();
    auto popped = frontier.pop(now);
    if (!popped) {
      bool idle;
      {
        std::lock_guard lk(shared.mu);
        idle = (shared.in_flight == 0);
      }
      if (frontier.empty() && idle) break;
      auto next = frontier.next_eligible_at(now);
      clock.sleep_until_ms(next ? *next : now + 10);
      continue;
    }
    entry = *popped;
    {
      std::lock_guard lk(shared.mu);
      if (!shared.budget_left(task.max_pages)) break;  // re-check after pop
      ++shared.visited;
      ++shared.in_flight;
      shared.report.pages_visited = shared.visited;
    }

    HttpResponse resp;
    bool fetched = false;
    for (int attempt = 0; attempt < 2 && !fetched; ++attempt) {
      try {
        resp = transport.request(entry.url, config.fetch_timeout_ms);
        fetched = true;
      } catch (const FetchFailed& e) {
        if (attempt == 1) {
          std::lock_guard lk(shared.mu);
          shared.report.errors.push_back({entry.url, "fetch-failed"});
        }
      }
    }
    if (fetched)
      process_response(entry, resp, frontier, shared, store, vocab, geo, config,
                       task.max_depth);
    {
      std::lock_guard lk(shared.mu);
      --shared.in_flight;
    }
  }
}

}  // namespace

CrawlReport run_crawl(CrawlTask& task, Transport& transport, Clock& clock,
                      CatalogueStore& store, const Vocabulary& vocab,
                      const GeoResolver& geo, const CrawlerConfig& config,
                      const std::function<bool()>& cancelled) {
  if (task.state != TaskState::Pending)
    throw TaskNotRunning("task " + task.task_id + " is not pending");
  if (task.seed_urls.empty())
    throw TaskNotRunning("task " + task.task_id + " has no seeds");
  task.state = TaskState::Running;

  Frontier frontier(task.max_depth, task.per_host_delay_ms);
  CrawlShared shared;
  for (const auto& seed : task.seed_urls) {
    try {
      push_with_probes(frontier, normalize_url(seed), 0, "", config.probe_patterns);
    } catch (const MalformedUrl&) {
      shared.report.errors.push_back({seed, "malformed-seed"});
    }
  }

  std::atomic<bool> stop{false};
  int workers = std::max(1, config.workers);
  if (workers == 1) {
    crawl_worker(frontier, shared, transport, clock, store, vocab, geo, config, task,
                 cancelled, stop);
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < workers; ++i)
      threads.emplace_back([&] {
        crawl_worker(frontier, shared, transport, clock, store, vocab, geo, config,
                     task, cancelled, stop);
      });
    for (auto& t : threads) t.join();
  }

  task.state = (cancelled && cancelled()) ? TaskState::Aborted : TaskState::Done;
  return shared.report;
}

std::vector<std::string> read_seed_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open seed file: " + path);
  std::vector<std::string> seeds;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r\n");
    seeds.push_back(line.substr(b, e - b + 1));
  }
  return seeds;
}

std::vector<std::string> FileSeedProvider::seeds_for(const std::vector<std::string>&) {
  return read_seed_file(path_);
}

void CannedSeedProvider::set(const std::string& keyword, std::vector<std::string> urls) {
  canned_[keyword] = std::move(urls);
}

std::vector<std::string> CannedSeedProvider::seeds_for(
    const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  for (const auto& kw : keywords) {
    auto it = canned_.find(kw);
    if (it == canned_.end()) continue;
    for (const auto& u : it->second)
      if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
  }
  return out;
}

struct CrawlManager::Job {
  CrawlTask task;
  CrawlReport report;
  std::atomic<bool> cancel{false};
  std::mutex mu;
  TaskState state = TaskState::Pending;
  std::thread thread;
};

CrawlManager::CrawlManager(Transport& transport, CatalogueStore& store,
                           const Vocabulary& vocab,
                           std::shared_ptr<const GeoResolver> geo, CrawlerConfig config)
    : transport_(transport),
      store_(store),
      vocab_(vocab),
      geo_(std::move(geo)),
      config_(std::move(config)) {}

CrawlManager::~CrawlManager() { wait_all(); }

std::string CrawlManager::start(CrawlTask task) {
  std::lock_guard lk(mu_);
  std::string id = "task-" + std::to_string(next_id_++);
  task.task_id = id;
  auto job = std::make_shared<Job>();
  job->task = std::move(task);
  jobs_[id] = job;
  job->thread = std::thread([this, job] {
    CrawlTask local = job->task;
    {
      std::lock_guard jlk(job->mu);
      job->state = TaskState::Running;
    }
    CrawlReport report;
    try {
      report = run_crawl(local, transport_, clock_, store_, vocab_, *geo_, config_,
                         [job] { return job->cancel.load(); });
    } catch (const std::exception& e) {
      report.errors.push_back({"", e.what()});
      local.state = TaskState::Done;
    }
    std::lock_guard jlk(job->mu);
    job->report = report;
    job->state = local.state;
  });
  return id;
}

std::optional<CrawlManager::Status> CrawlManager::status(const std::string& task_id) const {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lk(mu_);
    auto it = jobs_.find(task_id);
    if (it == jobs_.end()) return std::nullopt;
    job = it->second;
  }
  std::lock_guard jlk(job->mu);
  return Status{job->state, job->report};
}

bool CrawlManager::cancel(const std::string& task_id) {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lk(mu_);
    auto it = jobs_.find(task_id);
    if (it == jobs_.end()) return false;
    job = it->second;
  }
  job->cancel.store(true);
  return true;
}

void CrawlManager::wait_all() {
  std::vector<std::shared_ptr<Job>> jobs;
  {
    std::lock_guard lk(mu_);
    for (auto& [_, j] : jobs_) jobs.push_back(j);
  }
  for (auto& j : jobs)
    if (j->thread.joinable()) j->thread.join();
}

}  // namespace atmocat
