#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tips/catalog.hpp"
#include "tips/model.hpp"
#include "tips/monitor.hpp"
#include "tips/report.hpp"
#include "tips/specparse.hpp"

namespace tips {

// Bad input files: malformed JSON, unknown references, failed validation.
// The CLI maps these to exit status 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Trajectory files (JSON Lines: a header object, then one event per line)

struct TrajectoryHeader {
  std::string specRef;
  std::string catalogRef;
  std::uint64_t sessionSeed = 0;
  friend bool operator==(const TrajectoryHeader&, const TrajectoryHeader&) = default;
};

struct Trajectory {
  TrajectoryHeader header;
  std::vector<SimEvent> events;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

class TrajectoryError : public InputError {
 public:
  TrajectoryError(int line, const std::string& message)
      : InputError("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Event lines only (no header). Blank lines are skipped; line numbers in
// errors start at firstLine.
std::vector<SimEvent> parse_event_lines(std::string_view text, int firstLine = 1);
SimEvent parse_event_line(std::string_view line, int lineNumber);
std::string event_line(const SimEvent& e);

// Checks timestamp order and the trailing SessionEnd.
Trajectory parse_trajectory(std::string_view text);
Trajectory read_trajectory(const std::filesystem::path& path);
std::string trajectory_text(const Trajectory& t);
void write_trajectory(const Trajectory& t, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Golden scenarios

const std::vector<std::string>& scenario_names();
// Spec file (within the golden data directory) a scenario is written against.
std::string scenario_spec_file(std::string_view name);
// Throws Error for an unknown scenario name.
Trajectory gen_scenario(std::string_view name);

// ---------------------------------------------------------------------------
// Loading a spec for a session

struct LoadedSpec {
  Catalog catalog;
  ProcedureSpec spec;
  Scene scene;
};

// Builds, validates and composes the scene. Throws InputError listing the
// findings when the spec does not validate.
std::shared_ptr<const LoadedSpec> prepare_spec(const SpecDocument& doc, const Catalog& catalog);

// The catalog comes from catalogOverride, else the document's "catalog"
// reference resolved against the spec file's directory.
std::shared_ptr<const LoadedSpec> load_spec(const std::filesystem::path& specPath,
                                            const std::optional<std::filesystem::path>& catalogOverride = {});

// ---------------------------------------------------------------------------
// Sessions

// Drives one MonitorSet. Violations are snapshotted into
// <outDir>/<sessionId>/snapshots as they occur; finish() finalizes and writes
// report.json and message.txt into <outDir>/<sessionId>.
class SessionRunner {
 public:
  SessionRunner(std::shared_ptr<const LoadedSpec> spec, std::string sessionId,
                std::filesystem::path outDir);

  const std::string& session_id() const { return sessionId_; }
  const LoadedSpec& spec() const { return *spec_; }
  bool finished() const { return report_.has_value(); }
  const MonitorSet& monitors() const { return monitors_; }

  // Throws MonitorError for events the monitor rejects (state unchanged).
  std::vector<MonitorOutput> feed(const SimEvent& e);
  SessionReport finish();
  const std::optional<SessionReport>& report() const { return report_; }

  std::filesystem::path session_dir() const { return outDir_ / sessionId_; }
  std::filesystem::path snapshot_dir() const { return session_dir() / "snapshots"; }

 private:
  void record(const std::vector<Violation>& vs);

  std::shared_ptr<const LoadedSpec> spec_;
  std::string sessionId_;
  std::filesystem::path outDir_;
  MonitorSet monitors_;
  std::optional<SessionReport> report_;
};

struct ReplayOptions {
  std::optional<std::filesystem::path> catalog;
  std::optional<std::uint64_t> seed;  // overrides the trajectory header
};

SessionReport replay(const std::filesystem::path& specPath,
                     const std::filesystem::path& trajectoryPath,
                     const std::filesystem::path& outDir, const ReplayOptions& options = {});

SessionReport replay(std::shared_ptr<const LoadedSpec> spec, const Trajectory& trajectory,
                     const std::filesystem::path& outDir, std::optional<std::uint64_t> seed = {});

// 0 proficient, 1 otherwise.
int exit_status(const SessionReport& report);

}  // namespace tips
