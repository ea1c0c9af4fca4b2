#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace atmocat {

struct HttpResponse {
  int status = 0;
  std::string content_type;
  std::string body;
};

// Abstract HTTP transport so crawling and probing run identically against
// the real network and an in-process simulated web.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws FetchFailed on network-level failure (timeout, refused, DNS).
  virtual HttpResponse request(const std::string& url, int timeout_ms) = 0;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_until_ms(std::int64_t t) = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_until_ms(std::int64_t t) override;
};

// Virtual clock: sleeping just advances time. Deterministic tests only.
class SimClock : public Clock {
 public:
  std::int64_t now_ms() override { return now_; }
  void sleep_until_ms(std::int64_t t) override {
    if (t > now_) now_ = t;
  }
  void advance_ms(std::int64_t d) { now_ += d; }

 private:
  std::int64_t now_ = 0;
};

// Real client backed by cpp-httplib.
class NetworkTransport : public Transport {
 public:
  HttpResponse request(const std::string& url, int timeout_ms) override;
};

// In-process web: url -> (status, content-type, body). Records the fetch
// log (url, clock timestamp) when given a clock, for politeness assertions.
class SimulatedWeb : public Transport {
 public:
  void add(const std::string& url, int status, const std::string& content_type,
           const std::string& body);
  void add_timeout(const std::string& url);

  // TSV manifest: url <TAB> status <TAB> content-type <TAB> file-relative-path
  // Lines starting with '#' are comments; a file path of "-" means timeout.
  static std::shared_ptr<SimulatedWeb> load_manifest(const std::string& manifest_path);

  void set_clock(Clock* clock) { clock_ = clock; }
  HttpResponse request(const std::string& url, int timeout_ms) override;

  struct FetchEvent {
    std::string url;
    std::int64_t at_ms;
  };
  std::vector<FetchEvent> fetch_log() const;

 private:
  struct Entry {
    HttpResponse response;
    bool timeout = false;
  };
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
  std::vector<FetchEvent> log_;
  Clock* clock_ = nullptr;
};

}  // namespace atmocat
