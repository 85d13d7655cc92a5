#pragma once

// HTTP facade over the catalog, the spec validator and live sessions.
//
//   GET  /catalog/complete?prefix=P        completion list
//   POST /spec/validate                    findings for a spec document
//   POST /session[?seed=N]                 create a session from a spec document
//   POST /session/{id}/events              ingest a JSON Lines chunk of events
//   POST /session/{id}/end                 finalize, write and return the report
//   GET  /session/{id}/report              the finalized report
//   GET  /session/{id}/snapshots/{name}    one stored snapshot file

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "tips/catalog.hpp"

namespace tips {

struct ServiceOptions {
  std::filesystem::path outDir = "sessions";
  // When set, every session's spec and accepted events are logged here so
  // that recover() can rebuild open and finished sessions after a restart.
  std::optional<std::filesystem::path> walDir;
  int threads = 8;
};

class Service {
 public:
  Service(Catalog catalog, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the bound port
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves on the bound socket until stop(). Blocks.
  bool run();
  void stop();
  // True once run() is accepting connections.
  bool running() const;

  // Rebuilds sessions from the write-ahead log; returns how many were restored.
  std::size_t recover();
  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tips
