#pragma once

// Shared domain types for the safety-rule compiler and monitor.
//
// Units are fixed everywhere: millimeters, newtons, milliseconds and a
// dimensionless stretch ratio (current length / rest length).

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tips {

using TimeMs = std::int64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 lerp(const Vec3& a, const Vec3& b, double s) { return a + (b - a) * s; }

// ---------------------------------------------------------------------------
// Geometry

struct Sphere {
  Vec3 center;
  double radius = 0.0;
  friend bool operator==(const Sphere&, const Sphere&) = default;
};

struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
  friend bool operator==(const Capsule&, const Capsule&) = default;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

using GeometryPrimitive = std::variant<Sphere, Capsule, TriangleMesh>;

// Empty string when the primitive satisfies its invariants, otherwise the reason.
std::string primitive_problem(const GeometryPrimitive& g);

// ---------------------------------------------------------------------------
// Catalog entries

enum class SimletKind { Organ, Vessel, Duct, FattyTissue, Pouch };
enum class SimletFlag { Sensitive, Clippable, Cuttable, Suturable, RemovalTarget };
enum class VesselEnd { A, B };
enum class ToolCapability { Cauterize, Dissect, Cut, ClipApply, Grasp, Suture, Retrieve };

struct SutureRegionDef {
  std::string regionId;
  GeometryPrimitive geometry;
  friend bool operator==(const SutureRegionDef&, const SutureRegionDef&) = default;
};

struct Simlet {
  std::string id;
  std::string name;
  SimletKind kind = SimletKind::Organ;
  std::vector<GeometryPrimitive> geometry;
  std::optional<double> youngsModulus;
  std::optional<double> forceThreshold;
  std::optional<double> stretchThreshold;
  std::set<SimletFlag> flags;
  std::vector<SutureRegionDef> sutureRegions;
  std::vector<std::string> attachments;
  VesselEnd proximalEnd = VesselEnd::A;

  bool has(SimletFlag f) const { return flags.count(f) != 0; }
  friend bool operator==(const Simlet&, const Simlet&) = default;
};

struct ToolSpec {
  std::string id;
  std::string name;
  std::set<ToolCapability> capabilities;
  friend bool operator==(const ToolSpec&, const ToolSpec&) = default;
};

// ---------------------------------------------------------------------------
// Safety rules, one alternative per monitorable error class.

struct ProximityRule {
  std::string toolId;
  std::string protectedAnatomyId;
  double minDistance = 0.0;
  bool activeOnly = true;
  friend bool operator==(const ProximityRule&, const ProximityRule&) = default;
};

struct ForceLimitRule {
  std::string anatomyId;
  double maxForce = 0.0;
  std::optional<double> maxStretch;
  friend bool operator==(const ForceLimitRule&, const ForceLimitRule&) = default;
};

struct NoForeignBodiesRule {
  friend bool operator==(const NoForeignBodiesRule&, const NoForeignBodiesRule&) = default;
};

struct ClipLayoutRule {
  std::string vesselId;
  int requiredProximal = 0;
  int requiredDistal = 0;
  bool mustPrecedeCut = false;
  friend bool operator==(const ClipLayoutRule&, const ClipLayoutRule&) = default;
};

struct CompletionRule {
  std::string targetAnatomyId;
  bool mustBeFreed = true;
  bool mustBeRetrievedViaPouch = false;
  friend bool operator==(const CompletionRule&, const CompletionRule&) = default;
};

struct SutureRegionRule {
  std::string anatomyId;
  std::string regionId;
  friend bool operator==(const SutureRegionRule&, const SutureRegionRule&) = default;
};

using SafetyRule = std::variant<ProximityRule, ForceLimitRule, NoForeignBodiesRule,
                                ClipLayoutRule, CompletionRule, SutureRegionRule>;

struct TaskStep {
  int index = 0;  // 1-based
  std::string action;
  std::string anatomyId;
  std::string toolId;
  std::vector<SafetyRule> safety;
  std::string safetyText;
  std::string comment;
  friend bool operator==(const TaskStep&, const TaskStep&) = default;
};

struct ProcedureSpec {
  std::string title;
  std::string catalogRef;
  std::vector<TaskStep> steps;
  CompletionRule completionRule;
  // Simlet ids instantiated in the scene; empty means the whole catalog.
  std::vector<std::string> sceneIds;
  friend bool operator==(const ProcedureSpec&, const ProcedureSpec&) = default;
};

// ---------------------------------------------------------------------------
// Session event stream

struct ToolPose {
  std::string toolId;
  Vec3 tip;
  bool activated = false;
  friend bool operator==(const ToolPose&, const ToolPose&) = default;
};

struct ForceSample {
  std::string anatomyId;
  double force = 0.0;
  double stretch = 1.0;
  friend bool operator==(const ForceSample&, const ForceSample&) = default;
};

struct ClipApplied {
  std::string vesselId;
  double position = 0.0;  // 0 = proximal, 1 = distal
  friend bool operator==(const ClipApplied&, const ClipApplied&) = default;
};

struct Cut {
  std::string anatomyId;
  double position = 0.0;
  friend bool operator==(const Cut&, const Cut&) = default;
};

struct Suture {
  std::string anatomyId;
  Vec3 location;
  friend bool operator==(const Suture&, const Suture&) = default;
};

struct Detach {
  std::string childId;
  std::string parentId;
  friend bool operator==(const Detach&, const Detach&) = default;
};

struct Retrieve {
  std::string anatomyId;
  bool viaPouch = false;
  friend bool operator==(const Retrieve&, const Retrieve&) = default;
};

struct SessionEnd {
  friend bool operator==(const SessionEnd&, const SessionEnd&) = default;
};

using EventBody = std::variant<ToolPose, ForceSample, ClipApplied, Cut, Suture, Detach,
                               Retrieve, SessionEnd>;

struct SimEvent {
  TimeMs t = 0;
  EventBody body;
  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

// ---------------------------------------------------------------------------
// Findings

enum class ErrorType { I = 1, II, III, IV, V, VI };

std::string_view to_roman(ErrorType type);
std::optional<ErrorType> error_type_from_roman(std::string_view roman);

struct Quantity {
  double value = 0.0;
  std::string unit;  // "mm", "N", "x", or a count noun such as "clip"
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

struct Violation {
  TimeMs t = 0;
  ErrorType errorType = ErrorType::I;
  std::vector<Quantity> measured;
  std::vector<Quantity> threshold;
  std::vector<std::string> subjectIds;
  std::string snapshotBaseName;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct Achievement {
  int stepIndex = 0;  // 0 for procedure-level milestones
  TimeMs t = 0;
  std::string label;
  friend bool operator==(const Achievement&, const Achievement&) = default;
};

struct SessionReport {
  std::string sessionId;
  std::string specTitle;
  std::vector<Achievement> achievements;
  std::vector<Violation> violations;
  bool proficient = false;
  std::string snapshotDir;
  std::string messageText;
  friend bool operator==(const SessionReport&, const SessionReport&) = default;
};

// String tokens used by the file formats.
std::string_view to_string(SimletKind v);
std::string_view to_string(SimletFlag v);
std::string_view to_string(ToolCapability v);
std::string_view to_string(VesselEnd v);
std::optional<SimletKind> simlet_kind_from(std::string_view s);
std::optional<SimletFlag> simlet_flag_from(std::string_view s);
std::optional<ToolCapability> tool_capability_from(std::string_view s);
std::optional<VesselEnd> vessel_end_from(std::string_view s);

// Event body type tokens ("toolPose", "forceSample", ...).
std::string_view event_type_name(const EventBody& body);

}  // namespace tips
