#include "tips/serialize.hpp"

namespace tips {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key) {
  const json& v = field(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

std::string get_string(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_boolean()) throw FormatError(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::optional<double> get_optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::vector<std::string> get_strings(const json& j, const char* key, bool required = true) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw FormatError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_array()) throw FormatError(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : *it) {
    if (!e.is_string()) throw FormatError(std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

template <typename Enum, typename Parse>
Enum parse_enum(const json& j, const char* key, Parse parse) {
  std::string s = get_string(j, key);
  auto v = parse(s);
  if (!v) throw FormatError(std::string("field '") + key + "' has unknown value '" + s + "'");
  return *v;
}

}  // namespace

void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }

void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    throw FormatError("a point must be an array of three numbers");
  }
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(json& j, const GeometryPrimitive& g) {
  struct Visitor {
    json operator()(const Sphere& s) const {
      return {{"type", "sphere"}, {"center", s.center}, {"radius", s.radius}};
    }
    json operator()(const Capsule& c) const {
      return {{"type", "capsule"}, {"a", c.a}, {"b", c.b}, {"radius", c.radius}};
    }
    json operator()(const TriangleMesh& m) const {
      json tris = json::array();
      for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
      return {{"type", "mesh"}, {"vertices", m.vertices}, {"triangles", tris}};
    }
  };
  j = std::visit(Visitor{}, g);
}

void from_json(const json& j, GeometryPrimitive& g) {
  std::string type = get_string(j, "type");
  if (type == "sphere") {
    g = Sphere{get<Vec3>(j, "center"), get_number(j, "radius")};
  } else if (type == "capsule") {
    g = Capsule{get<Vec3>(j, "a"), get<Vec3>(j, "b"), get_number(j, "radius")};
  } else if (type == "mesh") {
    TriangleMesh m;
    m.vertices = get<std::vector<Vec3>>(j, "vertices");
    const json& tris = field(j, "triangles");
    if (!tris.is_array()) throw FormatError("field 'triangles' must be an array");
    for (const auto& t : tris) {
      if (!t.is_array() || t.size() != 3) throw FormatError("a triangle must list three indices");
      std::array<std::uint32_t, 3> idx{};
      for (std::size_t k = 0; k < 3; ++k) {
        if (!t[k].is_number_unsigned()) throw FormatError("triangle indices must be unsigned");
        idx[k] = t[k].get<std::uint32_t>();
      }
      m.triangles.push_back(idx);
    }
    g = std::move(m);
  } else {
    throw FormatError("unknown geometry type '" + type + "'");
  }
}

void to_json(json& j, const SutureRegionDef& r) {
  j = {{"regionId", r.regionId}, {"geometry", r.geometry}};
}

void from_json(const json& j, SutureRegionDef& r) {
  r.regionId = get_string(j, "regionId");
  r.geometry = get<GeometryPrimitive>(j, "geometry");
}

void to_json(json& j, const Simlet& s) {
  json flags = json::array();
  for (auto f : s.flags) flags.push_back(to_string(f));
  j = {{"id", s.id},
       {"name", s.name},
       {"kind", to_string(s.kind)},
       {"geometry", s.geometry},
       {"flags", flags},
       {"sutureRegions", s.sutureRegions},
       {"attachments", s.attachments},
       {"proximalEnd", to_string(s.proximalEnd)}};
  if (s.youngsModulus) j["youngsModulus"] = *s.youngsModulus;
  if (s.forceThreshold) j["forceThreshold"] = *s.forceThreshold;
  if (s.stretchThreshold) j["stretchThreshold"] = *s.stretchThreshold;
}

void from_json(const json& j, Simlet& s) {
  s = Simlet{};
  s.id = get_string(j, "id");
  s.name = get_string(j, "name");
  s.kind = parse_enum<SimletKind>(j, "kind", simlet_kind_from);
  s.geometry = get<std::vector<GeometryPrimitive>>(j, "geometry");
  s.youngsModulus = get_optional_number(j, "youngsModulus");
  s.forceThreshold = get_optional_number(j, "forceThreshold");
  s.stretchThreshold = get_optional_number(j, "stretchThreshold");
  for (const auto& f : get_strings(j, "flags", false)) {
    auto flag = simlet_flag_from(f);
    if (!flag) throw FormatError("unknown flag '" + f + "'");
    s.flags.insert(*flag);
  }
  if (j.contains("sutureRegions")) {
    s.sutureRegions = get<std::vector<SutureRegionDef>>(j, "sutureRegions");
  }
  s.attachments = get_strings(j, "attachments", false);
  if (j.contains("proximalEnd")) {
    s.proximalEnd = parse_enum<VesselEnd>(j, "proximalEnd", vessel_end_from);
  }
}

void to_json(json& j, const ToolSpec& t) {
  json caps = json::array();
  for (auto c : t.capabilities) caps.push_back(to_string(c));
  j = {{"id", t.id}, {"name", t.name}, {"capabilities", caps}};
}

void from_json(const json& j, ToolSpec& t) {
  t = ToolSpec{};
  t.id = get_string(j, "id");
  t.name = get_string(j, "name");
  for (const auto& c : get_strings(j, "capabilities")) {
    auto cap = tool_capability_from(c);
    if (!cap) throw FormatError("unknown capability '" + c + "'");
    t.capabilities.insert(*cap);
  }
}

void to_json(json& j, const CompletionRule& r) {
  j = {{"targetAnatomyId", r.targetAnatomyId},
       {"mustBeFreed", r.mustBeFreed},
       {"mustBeRetrievedViaPouch", r.mustBeRetrievedViaPouch}};
}

void from_json(const json& j, CompletionRule& r) {
  r.targetAnatomyId = get_string(j, "targetAnatomyId");
  r.mustBeFreed = get_bool(j, "mustBeFreed");
  r.mustBeRetrievedViaPouch = get_bool(j, "mustBeRetrievedViaPouch");
}

void to_json(json& j, const SafetyRule& r) {
  struct Visitor {
    json operator()(const ProximityRule& p) const {
      return {{"rule", "proximity"},
              {"toolId", p.toolId},
              {"protectedAnatomyId", p.protectedAnatomyId},
              {"minDistance", p.minDistance},
              {"activeOnly", p.activeOnly}};
    }
    json operator()(const ForceLimitRule& f) const {
      json out = {{"rule", "forceLimit"}, {"anatomyId", f.anatomyId}, {"maxForce", f.maxForce}};
      if (f.maxStretch) out["maxStretch"] = *f.maxStretch;
      return out;
    }
    json operator()(const NoForeignBodiesRule&) const { return {{"rule", "noForeignBodies"}}; }
    json operator()(const ClipLayoutRule& c) const {
      return {{"rule", "clipLayout"},
              {"vesselId", c.vesselId},
              {"requiredProximal", c.requiredProximal},
              {"requiredDistal", c.requiredDistal},
              {"mustPrecedeCut", c.mustPrecedeCut}};
    }
    json operator()(const CompletionRule& c) const {
      json out = c;
      out["rule"] = "completion";
      return out;
    }
    json operator()(const SutureRegionRule& s) const {
      return {{"rule", "sutureRegion"}, {"anatomyId", s.anatomyId}, {"regionId", s.regionId}};
    }
  };
  j = std::visit(Visitor{}, r);
}

void from_json(const json& j, SafetyRule& r) {
  std::string kind = get_string(j, "rule");
  if (kind == "proximity") {
    r = ProximityRule{get_string(j, "toolId"), get_string(j, "protectedAnatomyId"),
                      get_number(j, "minDistance"), get_bool(j, "activeOnly")};
  } else if (kind == "forceLimit") {
    r = ForceLimitRule{get_string(j, "anatomyId"), get_number(j, "maxForce"),
                       get_optional_number(j, "maxStretch")};
  } else if (kind == "noForeignBodies") {
    r = NoForeignBodiesRule{};
  } else if (kind == "clipLayout") {
    r = ClipLayoutRule{get_string(j, "vesselId"), get<int>(j, "requiredProximal"),
                       get<int>(j, "requiredDistal"), get_bool(j, "mustPrecedeCut")};
  } else if (kind == "completion") {
    r = j.get<CompletionRule>();
  } else if (kind == "sutureRegion") {
    r = SutureRegionRule{get_string(j, "anatomyId"), get_string(j, "regionId")};
  } else {
    throw FormatError("unknown rule '" + kind + "'");
  }
}

void to_json(json& j, const TaskStep& s) {
  j = {{"index", s.index},         {"action", s.action},         {"anatomyId", s.anatomyId},
       {"toolId", s.toolId},       {"safety", s.safety},         {"safetyText", s.safetyText},
       {"comment", s.comment}};
}

void from_json(const json& j, TaskStep& s) {
  s.index = get<int>(j, "index");
  s.action = get_string(j, "action");
  s.anatomyId = get_string(j, "anatomyId");
  s.toolId = get_string(j, "toolId");
  s.safety = get<std::vector<SafetyRule>>(j, "safety");
  s.safetyText = get_string(j, "safetyText");
  s.comment = get_string(j, "comment");
}

void to_json(json& j, const ProcedureSpec& s) {
  j = {{"title", s.title},
       {"catalogRef", s.catalogRef},
       {"steps", s.steps},
       {"completionRule", s.completionRule},
       {"sceneIds", s.sceneIds}};
}

void from_json(const json& j, ProcedureSpec& s) {
  s.title = get_string(j, "title");
  s.catalogRef = get_string(j, "catalogRef");
  s.steps = get<std::vector<TaskStep>>(j, "steps");
  s.completionRule = get<CompletionRule>(j, "completionRule");
  s.sceneIds = get_strings(j, "sceneIds", false);
}

void to_json(json& j, const SimEvent& e) {
  j = {{"t", e.t}, {"type", event_type_name(e.body)}};
  struct Visitor {
    json& j;
    void operator()(const ToolPose& p) const {
      j["toolId"] = p.toolId;
      j["tip"] = p.tip;
      j["activated"] = p.activated;
    }
    void operator()(const ForceSample& f) const {
      j["anatomyId"] = f.anatomyId;
      j["force"] = f.force;
      j["stretch"] = f.stretch;
    }
    void operator()(const ClipApplied& c) const {
      j["vesselId"] = c.vesselId;
      j["position"] = c.position;
    }
    void operator()(const Cut& c) const {
      j["anatomyId"] = c.anatomyId;
      j["position"] = c.position;
    }
    void operator()(const Suture& s) const {
      j["anatomyId"] = s.anatomyId;
      j["location"] = s.location;
    }
    void operator()(const Detach& d) const {
      j["childId"] = d.childId;
      j["parentId"] = d.parentId;
    }
    void operator()(const Retrieve& r) const {
      j["anatomyId"] = r.anatomyId;
      j["viaPouch"] = r.viaPouch;
    }
    void operator()(const SessionEnd&) const {}
  };
  std::visit(Visitor{j}, e.body);
}

void from_json(const json& j, SimEvent& e) {
  const json& tv = field(j, "t");
  if (!tv.is_number_integer()) throw FormatError("field 't' must be an integer");
  e.t = tv.get<TimeMs>();
  if (e.t < 0) throw FormatError("field 't' must be non-negative");
  std::string type = get_string(j, "type");
  auto unit_interval = [&](double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw FormatError("field 'position' must lie in [0,1]");
    return v;
  };
  if (type == "toolPose") {
    e.body = ToolPose{get_string(j, "toolId"), get<Vec3>(j, "tip"), get_bool(j, "activated")};
  } else if (type == "forceSample") {
    e.body = ForceSample{get_string(j, "anatomyId"), get_number(j, "force"),
                         get_number(j, "stretch")};
  } else if (type == "clipApplied") {
    e.body = ClipApplied{get_string(j, "vesselId"), unit_interval(get_number(j, "position"))};
  } else if (type == "cut") {
    e.body = Cut{get_string(j, "anatomyId"), unit_interval(get_number(j, "position"))};
  } else if (type == "suture") {
    e.body = Suture{get_string(j, "anatomyId"), get<Vec3>(j, "location")};
  } else if (type == "detach") {
    e.body = Detach{get_string(j, "childId"), get_string(j, "parentId")};
  } else if (type == "retrieve") {
    e.body = Retrieve{get_string(j, "anatomyId"), get_bool(j, "viaPouch")};
  } else if (type == "sessionEnd") {
    e.body = SessionEnd{};
  } else {
    throw FormatError("unknown event type '" + type + "'");
  }
}

void to_json(json& j, const Quantity& q) { j = {{"value", q.value}, {"unit", q.unit}}; }

void from_json(const json& j, Quantity& q) {
  q.value = get_number(j, "value");
  q.unit = get_string(j, "unit");
}

void to_json(json& j, const Violation& v) {
  j = {{"t", v.t},
       {"errorType", to_roman(v.errorType)},
       {"measured", v.measured},
       {"threshold", v.threshold},
       {"subjectIds", v.subjectIds},
       {"snapshotBaseName", v.snapshotBaseName}};
}

void from_json(const json& j, Violation& v) {
  v.t = get<TimeMs>(j, "t");
  v.errorType = parse_enum<ErrorType>(j, "errorType", error_type_from_roman);
  v.measured = get<std::vector<Quantity>>(j, "measured");
  v.threshold = get<std::vector<Quantity>>(j, "threshold");
  v.subjectIds = get_strings(j, "subjectIds");
  v.snapshotBaseName = get_string(j, "snapshotBaseName");
}

void to_json(json& j, const Achievement& a) {
  j = {{"stepIndex", a.stepIndex}, {"t", a.t}, {"label", a.label}};
}

void from_json(const json& j, Achievement& a) {
  a.stepIndex = get<int>(j, "stepIndex");
  a.t = get<TimeMs>(j, "t");
  a.label = get_string(j, "label");
}

void to_json(json& j, const SessionReport& r) {
  j = {{"sessionId", r.sessionId},     {"specTitle", r.specTitle},
       {"achievements", r.achievements}, {"violations", r.violations},
       {"proficient", r.proficient},   {"snapshotDir", r.snapshotDir},
       {"messageText", r.messageText}};
}

void from_json(const json& j, SessionReport& r) {
  r.sessionId = get_string(j, "sessionId");
  r.specTitle = get_string(j, "specTitle");
  r.achievements = get<std::vector<Achievement>>(j, "achievements");
  r.violations = get<std::vector<Violation>>(j, "violations");
  r.proficient = get_bool(j, "proficient");
  r.snapshotDir = get_string(j, "snapshotDir");
  r.messageText = get_string(j, "messageText");
}

}  // namespace tips
