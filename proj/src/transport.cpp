#include "atmocat/transport.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "atmocat/errors.hpp"
#include "atmocat/url.hpp"

namespace atmocat {

std::int64_t SystemClock::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_until_ms(std::int64_t t) {
  std::int64_t now = now_ms();
  if (t > now) std::this_thread::sleep_for(std::chrono::milliseconds(t - now));
}

HttpResponse NetworkTransport::request(const std::string& url, int timeout_ms) {
  Url u = Url::parse(url);
  std::string origin = u.scheme + "://" + u.host_port();
  httplib::Client cli(origin);
  cli.set_connection_timeout(0, timeout_ms * 1000);
  cli.set_read_timeout(0, timeout_ms * 1000);
  cli.set_follow_location(true);

  std::string target = u.path;
  bool first = true;
  for (const auto& [k, v] : u.query) {
    target += (first ? '?' : '&');
    target += k;
    if (!v.empty()) target += "=" + v;
    first = false;
  }
  auto res = cli.Get(target);
  if (!res) throw FetchFailed("fetch failed: " + url);
  HttpResponse r;
  r.status = res->status;
  r.content_type = res->get_header_value("Content-Type");
  r.body = res->body;
  return r;
}

void SimulatedWeb::add(const std::string& url, int status,
                       const std::string& content_type, const std::string& body) {
  std::lock_guard lk(mu_);
  entries_[url] = Entry{HttpResponse{status, content_type, body}, false};
}

void SimulatedWeb::add_timeout(const std::string& url) {
  std::lock_guard lk(mu_);
  entries_[url] = Entry{HttpResponse{}, true};
}

std::shared_ptr<SimulatedWeb> SimulatedWeb::load_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
  auto web = std::make_shared<SimulatedWeb>();
  std::filesystem::path dir = std::filesystem::path(manifest_path).parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string url, status_s, ctype, file;
    if (!std::getline(ls, url, '\t') || !std::getline(ls, status_s, '\t') ||
        !std::getline(ls, ctype, '\t') || !std::getline(ls, file))
      throw std::runtime_error("bad manifest line: " + line);
    if (file == "-") {
      web->add_timeout(url);
      continue;
    }
    std::ifstream body_in(dir / file, std::ios::binary);
    if (!body_in) throw std::runtime_error("manifest file missing: " + file);
    std::ostringstream body;
    body << body_in.rdbuf();
    web->add(url, std::stoi(status_s), ctype, body.str());
  }
  return web;
}

HttpResponse SimulatedWeb::request(const std::string& url, int /*timeout_ms*/) {
  std::lock_guard lk(mu_);
  log_.push_back({url, clock_ ? clock_->now_ms() : 0});
  auto it = entries_.find(url);
  if (it == entries_.end()) return HttpResponse{404, "text/plain", "not found"};
  if (it->second.timeout) throw FetchFailed("simulated timeout: " + url);
  return it->second.response;
}

std::vector<SimulatedWeb::FetchEvent> SimulatedWeb::fetch_log() const {
  std::lock_guard lk(mu_);
  return log_;
}

}  // namespace atmocat
