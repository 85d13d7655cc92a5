#include "tips/harness.hpp"
#include "tips/serialize.hpp"
#include "tips/validate.hpp"

namespace tips {

std::shared_ptr<const LoadedSpec> prepare_spec(const SpecDocument& doc, const Catalog& catalog) {
  auto loaded = std::make_shared<LoadedSpec>();
  loaded->catalog = catalog;
  try {
    loaded->spec = build_spec(doc, catalog);
  } catch (const SpecBuildError& e) {
    std::string where = e.step ? "step " + std::to_string(e.step) : std::string("header");
    std::string column = e.cause.column ? ", column " + std::to_string(e.cause.column) : "";
    throw InputError(where + " " + e.cause.field + column + ": " + e.cause.detail);
  }
  auto findings = validate_spec(loaded->spec, catalog);
  if (!findings.empty()) {
    std::string msg = "spec does not validate:";
    for (const auto& f : findings) {
      msg += "\n  step " + std::to_string(f.step) + " " + f.field + ": " + f.message;
    }
    throw InputError(msg);
  }
  try {
    loaded->scene = compose(catalog, scene_ids(loaded->spec, catalog));
  } catch (const CatalogError& e) {
    throw InputError(std::string("scene: ") + e.what());
  }
  return loaded;
}

std::shared_ptr<const LoadedSpec> load_spec(const std::filesystem::path& specPath,
                                            const std::optional<std::filesystem::path>& catalogOverride) {
  SpecDocument doc;
  try {
    doc = read_spec_document(specPath);
  } catch (const FormatError& e) {
    throw InputError(specPath.string() + ": " + e.what());
  }
  std::filesystem::path catalogPath;
  if (catalogOverride) {
    catalogPath = *catalogOverride;
  } else if (!doc.catalog.empty()) {
    catalogPath = specPath.parent_path() / doc.catalog;
  } else {
    throw InputError(specPath.string() + ": no catalog reference; pass one explicitly");
  }
  Catalog catalog;
  try {
    catalog = load_catalog_file(catalogPath);
  } catch (const CatalogError& e) {
    throw InputError(catalogPath.string() + ": " + e.what());
  }
  try {
    return prepare_spec(doc, catalog);
  } catch (const InputError& e) {
    throw InputError(specPath.string() + ": " + e.what());
  }
}

SessionRunner::SessionRunner(std::shared_ptr<const LoadedSpec> spec, std::string sessionId,
                             std::filesystem::path outDir)
    : spec_(std::move(spec)),
      sessionId_(std::move(sessionId)),
      outDir_(std::move(outDir)),
      monitors_(compile_monitors(spec_->spec, spec_->scene, spec_->catalog)) {}

void SessionRunner::record(const std::vector<Violation>& vs) {
  if (vs.empty()) return;
  SceneState state = monitors_.scene_state();
  for (const auto& v : vs) snapshot(spec_->scene, state, v, snapshot_dir());
}

std::vector<MonitorOutput> SessionRunner::feed(const SimEvent& e) {
  if (finished()) throw MonitorError("session already finalized");
  auto out = monitors_.step(e);
  std::vector<Violation> vs;
  for (const auto& o : out) {
    if (const auto* v = std::get_if<Violation>(&o)) vs.push_back(*v);
  }
  record(vs);
  return out;
}

SessionReport SessionRunner::finish() {
  if (report_) return *report_;
  record(monitors_.finalize().violations);
  auto report = build_report(sessionId_, spec_->spec, monitors_.achievements(),
                             monitors_.violations(), sessionId_ + "/snapshots");
  write_report(report, outDir_);
  report_ = std::move(report);
  return *report_;
}

SessionReport replay(std::shared_ptr<const LoadedSpec> spec, const Trajectory& trajectory,
                     const std::filesystem::path& outDir, std::optional<std::uint64_t> seed) {
  SessionRunner runner(std::move(spec), make_session_id(seed ? *seed : trajectory.header.sessionSeed),
                       outDir);
  for (std::size_t i = 0; i < trajectory.events.size(); ++i) {
    try {
      runner.feed(trajectory.events[i]);
    } catch (const MonitorError& e) {
      // Line 1 is the header.
      throw TrajectoryError(static_cast<int>(i) + 2, e.what());
    }
  }
  return runner.finish();
}

SessionReport replay(const std::filesystem::path& specPath,
                     const std::filesystem::path& trajectoryPath,
                     const std::filesystem::path& outDir, const ReplayOptions& options) {
  Trajectory trajectory = read_trajectory(trajectoryPath);
  return replay(load_spec(specPath, options.catalog), trajectory, outDir, options.seed);
}

int exit_status(const SessionReport& report) { return report.proficient ? 0 : 1; }

}  // namespace tips
