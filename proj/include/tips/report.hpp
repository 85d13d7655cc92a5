#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tips/catalog.hpp"
#include "tips/model.hpp"

namespace tips {

// ---------------------------------------------------------------------------
// Snapshot naming: <t ms, 8 digits>ms_type<roman>_<values>.<json|svg>

// Count units are written as integers; physical units keep at least one
// decimal. '.' becomes 'p' and multiple quantities are joined with '-'.
std::string value_token(const std::vector<Quantity>& values);
std::string snapshot_base_name(TimeMs t, ErrorType type, const std::vector<Quantity>& values);

const std::regex& snapshot_name_regex();

struct SnapshotName {
  TimeMs t = 0;
  ErrorType type = ErrorType::I;
  std::vector<Quantity> values;
  std::string extension;
};

std::optional<SnapshotName> parse_snapshot_name(std::string_view file_name);

// ---------------------------------------------------------------------------
// Scene state captured with each violation

struct ToolTipState {
  Vec3 tip;
  bool activated = false;
  friend bool operator==(const ToolTipState&, const ToolTipState&) = default;
};

struct DroppedClip {
  std::string vesselId;
  double position = 0.0;
  friend bool operator==(const DroppedClip&, const DroppedClip&) = default;
};

struct SceneState {
  TimeMs t = 0;
  std::map<std::string, ToolTipState> toolTips;
  std::map<std::string, std::vector<double>> clipMap;
  std::vector<DroppedClip> droppedClips;
  std::vector<AttachmentEdge> attachments;
  friend bool operator==(const SceneState&, const SceneState&) = default;
};

void to_json(nlohmann::json& j, const SceneState& s);

struct SnapshotFiles {
  std::string json;
  std::string svg;
};

// Orthographic XY projection of the scene; subject simlets highlighted.
std::string render_svg(const Scene& scene, const SceneState& state, const Violation* violation);

// Writes the state JSON and the SVG projection into dir. Throws Error when
// dir cannot be written.
SnapshotFiles snapshot(const Scene& scene, const SceneState& state, const Violation& v,
                       const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Session report

inline constexpr std::string_view kCompletionLabel = "completed: ";

// UUID-shaped session id; deterministic when a seed is given.
std::string make_session_id(std::optional<std::uint64_t> seed);

// Step indices and the completion milestone still missing from achievements.
std::vector<std::string> missing_achievements(const ProcedureSpec& spec,
                                              const std::vector<Achievement>& achievements);

SessionReport build_report(const std::string& sessionId, const ProcedureSpec& spec,
                           const std::vector<Achievement>& achievements,
                           const std::vector<Violation>& violations,
                           const std::string& snapshotDir);

std::string report_json_text(const SessionReport& report);

// Writes <dir>/<sessionId>/report.json and message.txt; returns the session directory.
std::filesystem::path write_report(const SessionReport& report, const std::filesystem::path& dir);

}  // namespace tips
