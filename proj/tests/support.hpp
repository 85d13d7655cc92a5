#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>

#include "tips/catalog.hpp"
#include "tips/harness.hpp"
#include "tips/specparse.hpp"

#ifndef TIPS_DATA_DIR
#error "TIPS_DATA_DIR must point at data/golden"
#endif

namespace tips::test {

inline std::filesystem::path data_dir() { return TIPS_DATA_DIR; }
inline std::filesystem::path golden_catalog_path() { return data_dir() / "catalog.json"; }
inline std::filesystem::path golden_spec_path() { return data_dir() / "cholecystectomy.json"; }
inline std::filesystem::path suture_spec_path() { return data_dir() / "cholecystectomy_suture.json"; }

inline const Catalog& golden_catalog() {
  static const Catalog c = load_catalog_file(golden_catalog_path());
  return c;
}

inline std::shared_ptr<const LoadedSpec> golden_spec() {
  static const auto s = load_spec(golden_spec_path());
  return s;
}

inline std::shared_ptr<const LoadedSpec> spec_for_scenario(std::string_view name) {
  static const auto suture = load_spec(suture_spec_path());
  return scenario_spec_file(name) == "cholecystectomy.json" ? golden_spec() : suture;
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("tips-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace tips::test
