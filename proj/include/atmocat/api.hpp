#pragma once

#include <memory>
#include <string>

#include "atmocat/config.hpp"
#include "atmocat/crawler.hpp"
#include "atmocat/store.hpp"
#include "atmocat/transport.hpp"
#include "atmocat/vocab.hpp"

namespace atmocat {

// HTTP facade over the catalogue: CSW-style KVP endpoint, JSON search and
// stats, harvest, and crawl-task control. Handlers are stateless; harvest
// and the crawl routes are the only mutating ones and require the API
// token when one is configured.
class ApiServer {
 public:
  ApiServer(const AppConfig& config, CatalogueStore& store, Transport& transport,
            const Vocabulary& vocab, std::shared_ptr<const GeoResolver> geo);
  ~ApiServer();

  // Binds and serves on a background thread. Port 0 picks a free port.
  bool start(const std::string& host, int port);
  int port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atmocat
