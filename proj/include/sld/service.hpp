#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "sld/store.hpp"
#include "sld/tts.hpp"

namespace sld::service {

struct ServiceOptions {
  // Where the store is persisted after each mutation; empty keeps it in memory only.
  std::filesystem::path store_dir;
  // Ledger file shown by /api/stats; empty means no ledger.
  std::filesystem::path ledger_path;
  std::string cors_origin = "*";
  std::uint64_t budget_chars = tts::kDefaultBudget;
  double readiness_threshold = tts::kReadinessThreshold;
  std::size_t default_page_size = 50;
  std::size_t max_page_size = 500;
};

/// HTTP facade for the capture UI. Mutations are serialized through one writer lock;
/// reads run concurrently under a shared lock.
class Service {
 public:
  Service(store::Store store, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and returns the port (pass 0 for any free port). Throws Io on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call bind() first.
  void run();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

  store::Store snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error code: 400 validation, 404 unknown id, 409 workflow conflict, 503 provider.
int http_status_for(Errc code) noexcept;

}  // namespace sld::service
