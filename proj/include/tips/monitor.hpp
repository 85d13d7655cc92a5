#pragma once

// Runtime monitors compiled from a procedure's safety rules.
//
// A MonitorSet consumes one session's event stream strictly in order. Each
// event may yield immediate alerts (tool tip turns red, vessel flashes) and
// violations; finalize() runs the end-of-session checks (stranded clips,
// unmet completion) and returns the accumulated achievements.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tips/catalog.hpp"
#include "tips/model.hpp"
#include "tips/report.hpp"

namespace tips {

class MonitorError : public Error {
 public:
  using Error::Error;
};

enum class AlertKind { ToolTipRed, VesselFlash };
std::string_view to_string(AlertKind k);

struct ImmediateAlert {
  TimeMs t = 0;
  AlertKind kind = AlertKind::ToolTipRed;
  std::string subjectId;
  double measured = 0.0;
  double threshold = 0.0;
  friend bool operator==(const ImmediateAlert&, const ImmediateAlert&) = default;
};

void to_json(nlohmann::json& j, const ImmediateAlert& a);

using MonitorOutput = std::variant<ImmediateAlert, Violation>;

struct FinalizeResult {
  std::vector<Achievement> achievements;
  std::vector<Violation> violations;  // emitted by the end-of-session checks
};

// Hysteresis factors: a breach episode ends once the distance recovers to
// 110% of its threshold, or force/stretch fall to 90% of theirs.
inline constexpr double kProximityRearm = 1.1;
inline constexpr double kForceRearm = 0.9;
// Tool-tip distance that counts as touching a step's anatomy.
inline constexpr double kContactMm = 1.0;

class MonitorSet {
 public:
  struct Proximity {
    ProximityRule rule;
    int step = 0;
    bool inEpisode = false;
  };
  struct Force {
    ForceLimitRule rule;
    int step = 0;
    bool inEpisode = false;
    double peakForce = 0.0;
    double peakStretch = 0.0;
  };
  struct ClipLayout {
    ClipLayoutRule rule;
    int step = 0;
  };
  struct ForeignBodies {
    int step = 0;
  };
  struct SutureRegion {
    SutureRegionRule rule;
    int step = 0;
  };
  struct Completion {
    CompletionRule rule;
  };
  using Monitor = std::variant<Proximity, Force, ClipLayout, ForeignBodies, SutureRegion, Completion>;

  enum class GoalKind { Clip, Cut, Suture, Retrieve, Free, Engage };
  struct StepGoal {
    int step = 0;
    GoalKind kind = GoalKind::Engage;
    std::string anatomyId;
    std::string toolId;
    std::string label;
    std::size_t requiredClips = 1;
    bool achieved = false;
  };

  // In rule-declaration order; the completion monitor comes last.
  const std::vector<Monitor>& monitors() const { return monitors_; }
  std::size_t count_proximity() const { return count<Proximity>(); }
  std::size_t count_force() const { return count<Force>(); }
  std::size_t count_clip_layout() const { return count<ClipLayout>(); }
  std::size_t count_foreign_bodies() const { return count<ForeignBodies>(); }
  std::size_t count_suture() const { return count<SutureRegion>(); }
  std::size_t count_completion() const { return count<Completion>(); }

  const std::map<std::string, std::vector<double>>& clip_map() const { return clipMap_; }
  const std::vector<DroppedClip>& dropped_clips() const { return dropped_; }
  const std::vector<AttachmentEdge>& attachment_state() const { return attachments_; }
  const std::vector<Achievement>& achievements() const { return achievements_; }
  const std::vector<Violation>& violations() const { return violations_; }
  const std::vector<StepGoal>& goals() const { return goals_; }
  bool finalized() const { return finalized_; }
  TimeMs last_time() const { return lastT_; }

  SceneState scene_state() const;

  std::vector<MonitorOutput> step(const SimEvent& e);
  FinalizeResult finalize();

 private:
  friend MonitorSet compile_monitors(const ProcedureSpec&, const Scene&, const Catalog&);

  template <typename T>
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& m : monitors_) n += std::holds_alternative<T>(m) ? 1 : 0;
    return n;
  }

  const Simlet& scene_simlet(const std::string& id) const;
  Violation make_violation(TimeMs t, ErrorType type, std::vector<Quantity> measured,
                           std::vector<Quantity> threshold, std::vector<std::string> subjects);
  void emit(std::vector<MonitorOutput>& out, Violation v);
  void achieve(TimeMs t, int step, std::string label);

  void on(TimeMs t, const ToolPose& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const ForceSample& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const ClipApplied& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const Cut& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const Suture& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const Detach& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const Retrieve& e, std::vector<MonitorOutput>& out);
  void on(TimeMs t, const SessionEnd& e, std::vector<MonitorOutput>& out);

  void update_goals(const SimEvent& e, bool clean);
  bool attached(const std::string& id) const;

  Scene scene_;
  std::set<std::string> toolIds_;
  std::set<std::string> stepAnatomy_;
  std::vector<Monitor> monitors_;
  std::vector<StepGoal> goals_;
  CompletionRule completion_;

  std::map<std::string, std::vector<double>> clipMap_;
  std::map<std::string, double> firstCut_;
  std::vector<DroppedClip> dropped_;
  std::vector<AttachmentEdge> attachments_;
  std::map<std::string, ToolTipState> toolTips_;
  std::vector<Achievement> achievements_;
  std::vector<Violation> violations_;
  std::set<std::string> usedNames_;
  bool completed_ = false;
  bool finalized_ = false;
  bool started_ = false;
  TimeMs lastT_ = 0;
};

// Throws MonitorError when a rule or step references anatomy absent from the scene.
MonitorSet compile_monitors(const ProcedureSpec& spec, const Scene& scene, const Catalog& catalog);

std::vector<MonitorOutput> step(MonitorSet& ms, const SimEvent& e);
FinalizeResult finalize(MonitorSet& ms);

}  // namespace tips
