#include "tips/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tips {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

class Validator {
 public:
  Validator(const ProcedureSpec& spec, const Catalog& catalog)
      : spec_(spec), catalog_(catalog) {
    auto ids = scene_ids(spec, catalog);
    scene_.insert(ids.begin(), ids.end());
  }

  std::vector<Finding> run() {
    for (const auto& id : spec_.sceneIds) {
      if (catalog_.find_simlet(id) == nullptr) add(0, "scene", "unresolved scene anatomy '" + id + "'");
    }
    if (spec_.steps.empty()) add(0, "steps", "spec has no steps");
    completion(0, spec_.completionRule);
    for (std::size_t i = 0; i < spec_.steps.size(); ++i) step(static_cast<int>(i) + 1, spec_.steps[i]);
    return std::move(findings_);
  }

 private:
  void add(int step, std::string field, std::string message, int column = 0) {
    findings_.push_back({step, column, std::move(field), std::move(message)});
  }

  // Returns true when the id names a simlet in the catalog and the scene.
  bool anatomy_ref(int step, const std::string& field, const std::string& id, const char* what) {
    if (catalog_.find_simlet(id) == nullptr) {
      add(step, field, std::string("unresolved ") + what + " '" + id + "'");
      return false;
    }
    if (scene_.count(id) == 0) {
      add(step, field, std::string(what) + " '" + id + "' is not in the scene");
      return false;
    }
    return true;
  }

  bool completion(int step, const CompletionRule& r) {
    return anatomy_ref(step, step == 0 ? "completion" : "safety", r.targetAnatomyId,
                       "completion anatomy");
  }

  void step(int n, const TaskStep& s) {
    if (s.index != n) add(n, "index", "step index " + std::to_string(s.index) + " out of order");
    if (s.action.empty()) add(n, "action", "empty action");
    if (catalog_.find_simlet(s.anatomyId) == nullptr) {
      add(n, "anatomy", "unresolved anatomy '" + s.anatomyId + "'");
    } else if (scene_.count(s.anatomyId) == 0) {
      add(n, "anatomy", "anatomy '" + s.anatomyId + "' is not in the scene");
    }
    bool tool_ok = catalog_.find_tool(s.toolId) != nullptr;
    if (!tool_ok) add(n, "tool", "unresolved tool '" + s.toolId + "'");

    std::size_t before = findings_.size();
    for (const auto& rule : s.safety) this->rule(n, s, rule);
    bool rules_ok = findings_.size() == before;

    // Only compare against a re-parse when the rules are sound on their own;
    // otherwise the re-parse fails on the same defect and would double-report.
    if (rules_ok && tool_ok) {
      try {
        auto reparsed = parse_safety(s.safetyText, catalog_, s.toolId);
        if (reparsed != s.safety) add(n, "safety", "safety text does not match the stored rules");
      } catch (const ParseError& e) {
        add(n, "safety", e.detail, e.column);
      }
    }
  }

  void rule(int n, const TaskStep& s, const SafetyRule& r) {
    struct Visitor {
      Validator& v;
      int n;
      const TaskStep& s;
      void operator()(const ProximityRule& p) const {
        if (!positive(p.minDistance)) v.add(n, "safety", "proximity distance must be positive");
        if (v.catalog_.find_tool(p.toolId) == nullptr) {
          v.add(n, "safety", "unresolved proximity tool '" + p.toolId + "'");
        }
        v.anatomy_ref(n, "safety", p.protectedAnatomyId, "protected anatomy");
      }
      void operator()(const ForceLimitRule& f) const {
        if (!positive(f.maxForce)) v.add(n, "safety", "force limit must be positive");
        if (f.maxStretch && !positive(*f.maxStretch)) {
          v.add(n, "safety", "stretch limit must be positive");
        }
        v.anatomy_ref(n, "safety", f.anatomyId, "force-limited anatomy");
      }
      void operator()(const NoForeignBodiesRule&) const {}
      void operator()(const ClipLayoutRule& c) const {
        if (c.requiredProximal < 0 || c.requiredDistal < 0) {
          v.add(n, "safety", "clip counts must be non-negative");
        } else if (c.requiredProximal + c.requiredDistal < 1) {
          v.add(n, "safety", "clip rule requires at least one clip");
        }
        if (v.anatomy_ref(n, "safety", c.vesselId, "clip-rule vessel")) {
          if (!v.catalog_.find_simlet(c.vesselId)->has(SimletFlag::Clippable)) {
            v.add(n, "safety", "clip rule on non-clippable simlet '" + c.vesselId + "'");
          }
        }
      }
      void operator()(const CompletionRule& c) const {
        v.completion(n, c);
        v.add(n, "safety", "completion rule must be declared once, in the spec header");
      }
      void operator()(const SutureRegionRule& r) const {
        if (!v.anatomy_ref(n, "safety", r.anatomyId, "suture anatomy")) return;
        const Simlet* simlet = v.catalog_.find_simlet(r.anatomyId);
        bool declared = std::any_of(simlet->sutureRegions.begin(), simlet->sutureRegions.end(),
                                    [&](const SutureRegionDef& d) { return d.regionId == r.regionId; });
        if (!declared) v.add(n, "safety", "unknown suture region '" + r.regionId + "'");
      }
    };
    std::visit(Visitor{*this, n, s}, r);
  }

  const ProcedureSpec& spec_;
  const Catalog& catalog_;
  std::set<std::string> scene_;
  std::vector<Finding> findings_;
};

}  // namespace

std::vector<std::string> scene_ids(const ProcedureSpec& spec, const Catalog& catalog) {
  if (!spec.sceneIds.empty()) return spec.sceneIds;
  std::vector<std::string> ids;
  for (const auto& [id, simlet] : catalog.simlets()) ids.push_back(id);
  return ids;
}

std::vector<Finding> validate_spec(const ProcedureSpec& spec, const Catalog& catalog) {
  return Validator(spec, catalog).run();
}

std::vector<Finding> check_spec_document(const SpecDocument& doc, const Catalog& catalog) {
  std::vector<Finding> findings;
  SpecDocument header_only = doc;
  header_only.steps.clear();
  ProcedureSpec spec;
  try {
    spec = build_spec(header_only, catalog);
  } catch (const SpecBuildError& e) {
    findings.push_back({0, e.cause.column, e.cause.field, e.cause.detail});
  }
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    int index = static_cast<int>(i) + 1;
    try {
      spec.steps.push_back(parse_step(doc.steps[i], catalog, index));
    } catch (const ParseError& e) {
      findings.push_back({index, e.column, e.field, e.detail});
    }
  }
  if (findings.empty()) findings = validate_spec(spec, catalog);
  return findings;
}

void to_json(nlohmann::json& j, const Finding& f) {
  j = {{"step", f.step}, {"column", f.column}, {"field", f.field}, {"message", f.message}};
}

}  // namespace tips
