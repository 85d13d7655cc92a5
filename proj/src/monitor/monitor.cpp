#include "tips/monitor.hpp"

#include <algorithm>
#include <limits>

#include "tips/geom.hpp"
#include "tips/name_index.hpp"
#include "tips/serialize.hpp"

namespace tips {

std::string_view to_string(AlertKind k) {
  return k == AlertKind::ToolTipRed ? "toolTipRed" : "vesselFlash";
}

void to_json(nlohmann::json& j, const ImmediateAlert& a) {
  j = {{"t", a.t},
       {"kind", to_string(a.kind)},
       {"subjectId", a.subjectId},
       {"measured", a.measured},
       {"threshold", a.threshold}};
}

namespace {

MonitorSet::GoalKind goal_kind(std::string_view action) {
  std::string verb = case_fold(action.substr(0, action.find(' ')));
  using K = MonitorSet::GoalKind;
  if (verb == "clip") return K::Clip;
  if (verb == "cut" || verb == "divide" || verb == "transect" || verb == "incise") return K::Cut;
  if (verb == "suture" || verb == "stitch" || verb == "close") return K::Suture;
  if (verb == "retrieve" || verb == "extract") return K::Retrieve;
  if (verb == "remove" || verb == "free" || verb == "detach") return K::Free;
  return K::Engage;
}

}  // namespace

MonitorSet compile_monitors(const ProcedureSpec& spec, const Scene& scene, const Catalog& catalog) {
  MonitorSet ms;
  ms.scene_ = scene;
  for (const auto& [id, tool] : catalog.tools()) ms.toolIds_.insert(id);
  ms.attachments_ = scene.attachmentGraph;
  ms.completion_ = spec.completionRule;

  auto require = [&](const std::string& id, int step, std::string_view what) {
    if (!scene.instances.count(id)) {
      throw MonitorError("step " + std::to_string(step) + ": " + std::string(what) + " '" + id +
                         "' is not in the scene");
    }
  };
  auto require_tool = [&](const std::string& id, int step) {
    if (!ms.toolIds_.count(id)) {
      throw MonitorError("step " + std::to_string(step) + ": unknown tool '" + id + "'");
    }
  };

  for (const auto& [id, s] : scene.instances) {
    if (s.has(SimletFlag::Clippable)) ms.clipMap_[id];
  }

  for (const auto& step : spec.steps) {
    require(step.anatomyId, step.index, "anatomy");
    require_tool(step.toolId, step.index);
    ms.stepAnatomy_.insert(step.anatomyId);
    std::size_t clips = 0;
    for (const auto& rule : step.safety) {
      std::visit(
          [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ProximityRule>) {
              require_tool(r.toolId, step.index);
              require(r.protectedAnatomyId, step.index, "protected anatomy");
              ms.monitors_.push_back(MonitorSet::Proximity{r, step.index});
            } else if constexpr (std::is_same_v<R, ForceLimitRule>) {
              require(r.anatomyId, step.index, "anatomy");
              ms.monitors_.push_back(MonitorSet::Force{r, step.index});
            } else if constexpr (std::is_same_v<R, NoForeignBodiesRule>) {
              ms.monitors_.push_back(MonitorSet::ForeignBodies{step.index});
            } else if constexpr (std::is_same_v<R, ClipLayoutRule>) {
              require(r.vesselId, step.index, "vessel");
              if (!scene.instances.at(r.vesselId).has(SimletFlag::Clippable)) {
                throw MonitorError("step " + std::to_string(step.index) + ": '" + r.vesselId +
                                   "' is not clippable");
              }
              ms.monitors_.push_back(MonitorSet::ClipLayout{r, step.index});
              if (r.vesselId == step.anatomyId) {
                clips += static_cast<std::size_t>(r.requiredProximal + r.requiredDistal);
              }
            } else if constexpr (std::is_same_v<R, SutureRegionRule>) {
              require(r.anatomyId, step.index, "anatomy");
              const auto& regions = scene.instances.at(r.anatomyId).sutureRegions;
              bool known = std::any_of(regions.begin(), regions.end(),
                                       [&](const auto& d) { return d.regionId == r.regionId; });
              if (!known) {
                throw MonitorError("step " + std::to_string(step.index) + ": unknown suture region '" +
                                   r.regionId + "'");
              }
              ms.monitors_.push_back(MonitorSet::SutureRegion{r, step.index});
            } else {
              throw MonitorError("step " + std::to_string(step.index) +
                                 ": completion rule inside a step");
            }
          },
          rule);
    }

    MonitorSet::StepGoal goal;
    goal.step = step.index;
    goal.kind = goal_kind(step.action);
    goal.anatomyId = step.anatomyId;
    goal.toolId = step.toolId;
    goal.requiredClips = std::max<std::size_t>(clips, 1);
    goal.label = "step " + std::to_string(step.index) + ": " + step.action + " " +
                 catalog.display_name(step.anatomyId);
    ms.goals_.push_back(std::move(goal));
  }

  require(spec.completionRule.targetAnatomyId, 0, "completion target");
  ms.monitors_.push_back(MonitorSet::Completion{spec.completionRule});
  return ms;
}

const Simlet& MonitorSet::scene_simlet(const std::string& id) const {
  auto it = scene_.instances.find(id);
  if (it == scene_.instances.end()) throw MonitorError("unknown simlet id '" + id + "'");
  return it->second;
}

Violation MonitorSet::make_violation(TimeMs t, ErrorType type, std::vector<Quantity> measured,
                                     std::vector<Quantity> threshold,
                                     std::vector<std::string> subjects) {
  Violation v;
  v.t = t;
  v.errorType = type;
  v.measured = std::move(measured);
  v.threshold = std::move(threshold);
  v.subjectIds = std::move(subjects);
  std::string base = snapshot_base_name(t, type, v.measured);
  std::string name = base;
  // Two findings of the same type and value at the same instant would share
  // a file name; later ones get a running suffix.
  for (int k = 2; usedNames_.count(name); ++k) name = base + "-" + std::to_string(k) + "dup";
  usedNames_.insert(name);
  v.snapshotBaseName = name;
  return v;
}

void MonitorSet::emit(std::vector<MonitorOutput>& out, Violation v) {
  violations_.push_back(v);
  out.emplace_back(std::move(v));
}

void MonitorSet::achieve(TimeMs t, int step, std::string label) {
  achievements_.push_back(Achievement{step, t, std::move(label)});
}

bool MonitorSet::attached(const std::string& id) const {
  return std::any_of(attachments_.begin(), attachments_.end(),
                     [&](const AttachmentEdge& e) { return e.childId == id || e.parentId == id; });
}

SceneState MonitorSet::scene_state() const {
  SceneState s;
  s.t = lastT_;
  s.toolTips = toolTips_;
  s.clipMap = clipMap_;
  s.droppedClips = dropped_;
  s.attachments = attachments_;
  return s;
}

void MonitorSet::on(TimeMs t, const ToolPose& e, std::vector<MonitorOutput>& out) {
  if (!toolIds_.count(e.toolId)) throw MonitorError("unknown tool id '" + e.toolId + "'");
  if (!e.tip.finite()) throw MonitorError("tool pose is not finite");
  toolTips_[e.toolId] = ToolTipState{e.tip, e.activated};
  for (auto& m : monitors_) {
    auto* p = std::get_if<Proximity>(&m);
    if (!p || p->rule.toolId != e.toolId) continue;
    bool live = e.activated || !p->rule.activeOnly;
    if (!live) {
      p->inEpisode = false;
      continue;
    }
    double d = geom::dist_point_simlet(e.tip, scene_simlet(p->rule.protectedAnatomyId));
    if (p->inEpisode) {
      if (d >= p->rule.minDistance * kProximityRearm) p->inEpisode = false;
      continue;
    }
    if (d < p->rule.minDistance) {
      p->inEpisode = true;
      out.emplace_back(ImmediateAlert{t, AlertKind::ToolTipRed, e.toolId, d, p->rule.minDistance});
      emit(out, make_violation(t, ErrorType::I, {{d, "mm"}}, {{p->rule.minDistance, "mm"}},
                               {e.toolId, p->rule.protectedAnatomyId}));
    }
  }
}

void MonitorSet::on(TimeMs t, const ForceSample& e, std::vector<MonitorOutput>& out) {
  scene_simlet(e.anatomyId);
  if (!std::isfinite(e.force) || !std::isfinite(e.stretch)) {
    throw MonitorError("force sample is not finite");
  }
  for (auto& m : monitors_) {
    auto* f = std::get_if<Force>(&m);
    if (!f || f->rule.anatomyId != e.anatomyId) continue;
    const auto& r = f->rule;
    bool forceHigh = e.force > r.maxForce;
    bool stretchHigh = r.maxStretch && e.stretch > *r.maxStretch;
    if (f->inEpisode) {
      f->peakForce = std::max(f->peakForce, e.force);
      f->peakStretch = std::max(f->peakStretch, e.stretch);
      bool forceCalm = e.force <= r.maxForce * kForceRearm;
      bool stretchCalm = !r.maxStretch || e.stretch <= *r.maxStretch * kForceRearm;
      if (forceCalm && stretchCalm) f->inEpisode = false;
      continue;
    }
    if (!forceHigh && !stretchHigh) continue;
    f->inEpisode = true;
    f->peakForce = e.force;
    f->peakStretch = e.stretch;
    std::vector<Quantity> measured;
    std::vector<Quantity> threshold;
    if (forceHigh) {
      measured.push_back({e.force, "N"});
      threshold.push_back({r.maxForce, "N"});
    }
    if (stretchHigh) {
      measured.push_back({e.stretch, "x"});
      threshold.push_back({*r.maxStretch, "x"});
    }
    out.emplace_back(ImmediateAlert{t, AlertKind::VesselFlash, e.anatomyId, measured.front().value,
                                    threshold.front().value});
    emit(out, make_violation(t, ErrorType::II, std::move(measured), std::move(threshold),
                             {e.anatomyId}));
  }
}

void MonitorSet::on(TimeMs, const ClipApplied& e, std::vector<MonitorOutput>&) {
  auto it = clipMap_.find(e.vesselId);
  if (it == clipMap_.end()) {
    scene_simlet(e.vesselId);
    throw MonitorError("'" + e.vesselId + "' is not clippable");
  }
  if (!(e.position >= 0.0 && e.position <= 1.0)) throw MonitorError("clip position outside [0, 1]");
  auto& clips = it->second;
  clips.insert(std::upper_bound(clips.begin(), clips.end(), e.position), e.position);
}

void MonitorSet::on(TimeMs t, const Cut& e, std::vector<MonitorOutput>& out) {
  const Simlet& s = scene_simlet(e.anatomyId);
  if (!(e.position >= 0.0 && e.position <= 1.0)) throw MonitorError("cut position outside [0, 1]");

  bool governed = false;
  auto clips = clipMap_.find(e.anatomyId);
  for (auto& m : monitors_) {
    auto* c = std::get_if<ClipLayout>(&m);
    if (!c || c->rule.vesselId != e.anatomyId || !c->rule.mustPrecedeCut) continue;
    governed = true;
    int prox = 0;
    int dist = 0;
    if (clips != clipMap_.end()) {
      for (double p : clips->second) {
        prox += p < e.position ? 1 : 0;
        dist += p > e.position ? 1 : 0;
      }
    }
    if (prox < c->rule.requiredProximal || dist < c->rule.requiredDistal) {
      emit(out, make_violation(t, ErrorType::IV, {{double(prox), "prox"}, {double(dist), "dist"}},
                               {{double(c->rule.requiredProximal), "prox"},
                                {double(c->rule.requiredDistal), "dist"}},
                               {e.anatomyId}));
    }
  }

  if (!governed) {
    bool sanctioned = s.has(SimletFlag::Cuttable) &&
                      (s.has(SimletFlag::Clippable) || stepAnatomy_.count(e.anatomyId));
    if (!sanctioned) {
      emit(out, make_violation(t, ErrorType::I, {{0.0, "mm"}}, {}, {e.anatomyId}));
    }
  }

  if (clips != clipMap_.end()) {
    firstCut_.emplace(e.anatomyId, e.position);
    auto& list = clips->second;
    // A cut proximal of every clip leaves them all on the detached segment.
    if (!list.empty() && e.position < list.front()) {
      for (double p : list) dropped_.push_back(DroppedClip{e.anatomyId, p});
      list.clear();
    }
  }
}

void MonitorSet::on(TimeMs t, const Suture& e, std::vector<MonitorOutput>& out) {
  const Simlet& s = scene_simlet(e.anatomyId);
  if (!e.location.finite()) throw MonitorError("suture location is not finite");
  bool governed = false;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : monitors_) {
    const auto* r = std::get_if<SutureRegion>(&m);
    if (!r || r->rule.anatomyId != e.anatomyId) continue;
    governed = true;
    for (const auto& region : s.sutureRegions) {
      if (region.regionId != r->rule.regionId) continue;
      best = std::min(best, geom::dist_point_primitive(e.location, region.geometry));
    }
  }
  if (governed && best > 0.0) {
    emit(out, make_violation(t, ErrorType::VI, {{best, "mm"}}, {{0.0, "mm"}}, {e.anatomyId}));
  }
}

void MonitorSet::on(TimeMs t, const Detach& e, std::vector<MonitorOutput>&) {
  scene_simlet(e.childId);
  scene_simlet(e.parentId);
  auto it = std::find_if(attachments_.begin(), attachments_.end(),
                         [&](const AttachmentEdge& a) { return joins(a, e.childId, e.parentId); });
  if (it == attachments_.end()) return;
  attachments_.erase(it);
  for (const auto& id : {e.childId, e.parentId}) {
    const Simlet& s = scene_simlet(id);
    if (s.has(SimletFlag::RemovalTarget) && !attached(id)) achieve(t, 0, "freed " + s.name);
  }
}

void MonitorSet::on(TimeMs t, const Retrieve& e, std::vector<MonitorOutput>& out) {
  const Simlet& s = scene_simlet(e.anatomyId);
  const std::string& target = completion_.targetAnatomyId;
  if (e.anatomyId != target) {
    emit(out, make_violation(t, ErrorType::V, {{1.0, "wrong"}}, {{0.0, "wrong"}},
                             {e.anatomyId, target}));
    return;
  }
  achieve(t, 0, "retrieved " + s.name + (e.viaPouch ? " via pouch" : ""));
  if (completed_) return;
  bool freed = !completion_.mustBeFreed || !attached(target);
  bool pouch = !completion_.mustBeRetrievedViaPouch || e.viaPouch;
  if (freed && pouch) {
    completed_ = true;
    std::string how = completion_.mustBeFreed ? " freed and retrieved" : " retrieved";
    if (completion_.mustBeRetrievedViaPouch) how += " via pouch";
    achieve(t, 0, std::string(kCompletionLabel) + s.name + how);
  }
}

void MonitorSet::on(TimeMs, const SessionEnd&, std::vector<MonitorOutput>& out) {
  for (auto& v : finalize().violations) out.emplace_back(std::move(v));
}

void MonitorSet::update_goals(const SimEvent& e, bool clean) {
  for (auto& g : goals_) {
    if (g.achieved) continue;
    bool hit = std::visit(
        [&](const auto& b) -> bool {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, ToolPose>) {
            if (g.kind != GoalKind::Engage || b.toolId != g.toolId || !b.activated) return false;
            return geom::dist_point_simlet(b.tip, scene_simlet(g.anatomyId)) < kContactMm;
          } else if constexpr (std::is_same_v<B, ClipApplied>) {
            if (g.kind != GoalKind::Clip || b.vesselId != g.anatomyId) return false;
            return clipMap_.at(g.anatomyId).size() >= g.requiredClips;
          } else if constexpr (std::is_same_v<B, Cut>) {
            return g.kind == GoalKind::Cut && b.anatomyId == g.anatomyId && clean;
          } else if constexpr (std::is_same_v<B, Suture>) {
            return g.kind == GoalKind::Suture && b.anatomyId == g.anatomyId && clean;
          } else if constexpr (std::is_same_v<B, Detach>) {
            bool involved = b.childId == g.anatomyId || b.parentId == g.anatomyId;
            if (g.kind == GoalKind::Engage) return involved;
            return g.kind == GoalKind::Free && involved && !attached(g.anatomyId);
          } else if constexpr (std::is_same_v<B, Retrieve>) {
            return g.kind == GoalKind::Retrieve && b.anatomyId == g.anatomyId;
          } else {
            return false;
          }
        },
        e.body);
    if (hit) {
      g.achieved = true;
      achieve(e.t, g.step, g.label);
    }
  }
}

std::vector<MonitorOutput> MonitorSet::step(const SimEvent& e) {
  if (finalized_) throw MonitorError("session already finalized");
  if (e.t < 0) throw MonitorError("negative timestamp");
  if (started_ && e.t < lastT_) {
    throw MonitorError("decreasing timestamp: " + std::to_string(e.t) + " ms after " +
                       std::to_string(lastT_) + " ms");
  }
  const TimeMs prevT = lastT_;
  const bool prevStarted = started_;
  started_ = true;
  lastT_ = e.t;
  std::vector<MonitorOutput> out;
  std::size_t before = violations_.size();
  try {
    std::visit([&](const auto& b) { on(e.t, b, out); }, e.body);
  } catch (const MonitorError&) {
    // Handlers validate before mutating, so only the clock needs rolling back.
    lastT_ = prevT;
    started_ = prevStarted;
    throw;
  }
  if (!finalized_) update_goals(e, violations_.size() == before);
  return out;
}

FinalizeResult MonitorSet::finalize() {
  FinalizeResult result;
  if (finalized_) {
    result.achievements = achievements_;
    return result;
  }
  finalized_ = true;
  std::size_t before = violations_.size();
  std::vector<MonitorOutput> sink;
  bool foreignChecked = false;
  for (const auto& m : monitors_) {
    if (const auto* c = std::get_if<ClipLayout>(&m); c && !c->rule.mustPrecedeCut) {
      auto cut = firstCut_.find(c->rule.vesselId);
      if (cut == firstCut_.end()) continue;
      int prox = 0;
      int dist = 0;
      for (double p : clipMap_.at(c->rule.vesselId)) {
        prox += p < cut->second ? 1 : 0;
        dist += p > cut->second ? 1 : 0;
      }
      if (prox < c->rule.requiredProximal || dist < c->rule.requiredDistal) {
        emit(sink, make_violation(lastT_, ErrorType::IV,
                                  {{double(prox), "prox"}, {double(dist), "dist"}},
                                  {{double(c->rule.requiredProximal), "prox"},
                                   {double(c->rule.requiredDistal), "dist"}},
                                  {c->rule.vesselId}));
      }
    } else if (std::holds_alternative<ForeignBodies>(m) && !foreignChecked) {
      foreignChecked = true;
      for (const auto& d : dropped_) {
        emit(sink, make_violation(lastT_, ErrorType::III, {{1.0, "clip"}}, {{0.0, "clip"}},
                                  {d.vesselId}));
      }
    } else if (std::holds_alternative<Completion>(m) && !completed_) {
      emit(sink, make_violation(lastT_, ErrorType::V, {{0.0, "ach"}}, {{1.0, "ach"}},
                                {completion_.targetAnatomyId}));
    }
  }
  result.violations.assign(violations_.begin() + static_cast<std::ptrdiff_t>(before),
                           violations_.end());
  result.achievements = achievements_;
  return result;
}

std::vector<MonitorOutput> step(MonitorSet& ms, const SimEvent& e) { return ms.step(e); }
FinalizeResult finalize(MonitorSet& ms) { return ms.finalize(); }

}  // namespace tips
