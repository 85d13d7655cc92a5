#include <algorithm>
#include <atomic>
#include <csignal>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tips/catalog.hpp"
#include "tips/harness.hpp"
#include "tips/serialize.hpp"
#include "tips/service.hpp"
#include "tips/specparse.hpp"
#include "tips/validate.hpp"

#ifndef TIPS_DATA_DIR
#define TIPS_DATA_DIR "data/golden"
#endif

namespace fs = std::filesystem;
using namespace tips;

namespace {

constexpr int kExitInput = 2;

fs::path default_catalog() { return fs::path(TIPS_DATA_DIR) / "catalog.json"; }

Catalog open_catalog(const std::optional<std::string>& path, const fs::path& fallback) {
  fs::path p = path ? fs::path(*path) : fallback;
  try {
    return load_catalog_file(p);
  } catch (const CatalogError& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

// First existing candidate for a reference found in a trajectory header.
fs::path locate(const std::string& ref, const fs::path& nearDir) {
  fs::path r(ref);
  if (r.is_absolute()) return r;
  for (const fs::path& base : {nearDir, fs::path(TIPS_DATA_DIR)}) {
    if (fs::exists(base / r)) return base / r;
  }
  return nearDir / r;
}

struct CheckArgs {
  std::string input;
  std::optional<std::string> spec;
  std::optional<std::string> catalog;
  std::string out = "reports";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int check_one(const fs::path& trajectoryPath, const CheckArgs& args, std::ostream& log) {
  Trajectory trajectory = read_trajectory(trajectoryPath);
  fs::path specPath = args.spec ? fs::path(*args.spec)
                                : locate(trajectory.header.specRef, trajectoryPath.parent_path());
  std::optional<fs::path> catalog;
  if (args.catalog) catalog = fs::path(*args.catalog);
  auto spec = load_spec(specPath, catalog);
  SessionReport report = replay(spec, trajectory, args.out, args.seed);
  log << trajectoryPath.string() << ": " << report.violations.size() << " errors, "
      << report.achievements.size() << " achievements, "
      << (report.proficient ? "proficient" : "not proficient") << " -> "
      << (fs::path(args.out) / report.sessionId).string() << "\n";
  if (!args.quiet) std::cout << report.messageText;
  return exit_status(report);
}

int run_check(const CheckArgs& args) {
  fs::path input(args.input);
  if (!fs::is_directory(input)) return check_one(input, args, std::cerr);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .jsonl trajectories in " + input.string());

  CheckArgs batch = args;
  batch.quiet = true;
  std::vector<std::future<std::pair<int, std::string>>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [f, &batch] {
      std::ostringstream log;
      try {
        int code = check_one(f, batch, log);
        return std::make_pair(code, log.str());
      } catch (const std::exception& e) {
        return std::make_pair(kExitInput, f.string() + ": " + e.what() + "\n");
      }
    }));
  }
  int worst = 0;
  for (auto& j : jobs) {
    auto [code, text] = j.get();
    std::cerr << text;
    worst = std::max(worst, code);
  }
  return worst;
}

std::atomic<Service*> g_service{nullptr};

void on_signal(int) {
  if (Service* s = g_service.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-rule compiler and session monitor for surgical training scenarios"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* checkCmd = app.add_subcommand("check", "Replay a trajectory (or a directory of them) and write reports");
  checkCmd->add_option("trajectory", check.input, "Trajectory .jsonl file or directory")->required();
  checkCmd->add_option("--spec", check.spec, "Spec document (default: the trajectory header's specRef)");
  checkCmd->add_option("--catalog", check.catalog, "Catalog file (default: the spec's reference)");
  checkCmd->add_option("--out", check.out, "Report directory")->capture_default_str();
  checkCmd->add_option("--seed", check.seed, "Session id seed (default: the trajectory header's)");
  checkCmd->add_flag("--quiet", check.quiet, "Do not print the report message");

  std::string scenario;
  std::optional<std::string> scenarioOut;
  auto* genCmd = app.add_subcommand("gen-scenario", "Write a golden scenario trajectory");
  genCmd->add_option("name", scenario, "clean, errI .. errVI, or 'all'")->required();
  genCmd->add_option("--out", scenarioOut, "Output file (directory for 'all'); stdout if omitted");
  genCmd->add_option("--seed", check.seed, "Session seed written into the header");

  std::string specFile;
  std::optional<std::string> catalogFile;
  auto* validateCmd = app.add_subcommand("validate", "Check a spec document; prints findings as JSON");
  validateCmd->add_option("spec", specFile, "Spec document")->required();
  validateCmd->add_option("--catalog", catalogFile, "Catalog file (default: the spec's reference)");

  std::string prefix;
  auto* completeCmd = app.add_subcommand("complete", "List catalog names starting with a prefix");
  completeCmd->add_option("prefix", prefix, "Case-insensitive prefix (may be empty)");
  completeCmd->add_option("--catalog", catalogFile, "Catalog file");

  std::optional<std::string> pagesOut;
  auto* instrCmd = app.add_subcommand("instructions", "Generate instruction pages for a spec");
  instrCmd->add_option("spec", specFile, "Spec document")->required();
  instrCmd->add_option("--catalog", catalogFile, "Catalog file (default: the spec's reference)");
  instrCmd->add_option("--out", pagesOut, "Directory for step-NN.md pages; stdout if omitted");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string serveOut = "sessions";
  std::optional<std::string> walDir;
  auto* serveCmd = app.add_subcommand("serve", "Run the HTTP service");
  serveCmd->add_option("--catalog", catalogFile, "Catalog file");
  serveCmd->add_option("--host", host)->capture_default_str();
  serveCmd->add_option("--port", port)->capture_default_str();
  serveCmd->add_option("--out", serveOut, "Session report directory")->capture_default_str();
  serveCmd->add_option("--wal", walDir, "Write-ahead log directory (enables recovery)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*checkCmd) return run_check(check);

    if (*genCmd) {
      std::vector<std::string> names;
      if (scenario == "all") {
        names = scenario_names();
      } else {
        names.push_back(scenario);
      }
      for (const auto& name : names) {
        Trajectory t = gen_scenario(name);
        if (check.seed) t.header.sessionSeed = *check.seed;
        if (!scenarioOut) {
          std::cout << trajectory_text(t);
        } else if (scenario == "all") {
          fs::create_directories(*scenarioOut);
          write_trajectory(t, fs::path(*scenarioOut) / (name + ".jsonl"));
        } else {
          write_trajectory(t, *scenarioOut);
        }
      }
      return 0;
    }

    if (*validateCmd || *instrCmd) {
      SpecDocument doc;
      try {
        doc = read_spec_document(specFile);
      } catch (const FormatError& e) {
        throw InputError(e.what());
      }
      fs::path fallback = fs::path(specFile).parent_path() / doc.catalog;
      Catalog catalog = open_catalog(catalogFile, doc.catalog.empty() ? default_catalog() : fallback);
      if (*validateCmd) {
        auto findings = check_spec_document(doc, catalog);
        std::cout << nlohmann::json(findings).dump(2) << "\n";
        return findings.empty() ? 0 : 1;
      }
      auto spec = prepare_spec(doc, catalog);
      auto pages = generate_instructions(spec->spec, catalog);
      if (pagesOut) {
        for (const auto& p : write_instruction_pages(pages, *pagesOut)) std::cout << p.string() << "\n";
      } else {
        for (const auto& p : pages) std::cout << render_markdown(p) << "\n";
      }
      return 0;
    }

    if (*completeCmd) {
      Catalog catalog = open_catalog(catalogFile, default_catalog());
      for (const auto& name : catalog.complete(prefix)) std::cout << name << "\n";
      return 0;
    }

    if (*serveCmd) {
      Catalog catalog = open_catalog(catalogFile, default_catalog());
      ServiceOptions options;
      options.outDir = serveOut;
      if (walDir) options.walDir = fs::path(*walDir);
      Service service(std::move(catalog), options);
      std::size_t restored = service.recover();
      int bound = service.bind(host, port);
      if (bound < 0) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return kExitInput;
      }
      std::cerr << "listening on http://" << host << ":" << bound;
      if (restored) std::cerr << " (" << restored << " sessions recovered)";
      std::cerr << std::endl;
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.run();
      g_service = nullptr;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
