#include "tips/model.hpp"

#include <algorithm>

namespace tips {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                         Enum v) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<SimletKind, std::string_view>, 5> kKinds{{
    {SimletKind::Organ, "organ"},
    {SimletKind::Vessel, "vessel"},
    {SimletKind::Duct, "duct"},
    {SimletKind::FattyTissue, "fattyTissue"},
    {SimletKind::Pouch, "pouch"},
}};

constexpr std::array<std::pair<SimletFlag, std::string_view>, 5> kFlags{{
    {SimletFlag::Sensitive, "sensitive"},
    {SimletFlag::Clippable, "clippable"},
    {SimletFlag::Cuttable, "cuttable"},
    {SimletFlag::Suturable, "suturable"},
    {SimletFlag::RemovalTarget, "removalTarget"},
}};

constexpr std::array<std::pair<ToolCapability, std::string_view>, 7> kCaps{{
    {ToolCapability::Cauterize, "cauterize"},
    {ToolCapability::Dissect, "dissect"},
    {ToolCapability::Cut, "cut"},
    {ToolCapability::ClipApply, "clipApply"},
    {ToolCapability::Grasp, "grasp"},
    {ToolCapability::Suture, "suture"},
    {ToolCapability::Retrieve, "retrieve"},
}};

constexpr std::array<std::pair<VesselEnd, std::string_view>, 2> kEnds{{
    {VesselEnd::A, "A"},
    {VesselEnd::B, "B"},
}};

constexpr std::array<std::pair<ErrorType, std::string_view>, 6> kRoman{{
    {ErrorType::I, "I"},
    {ErrorType::II, "II"},
    {ErrorType::III, "III"},
    {ErrorType::IV, "IV"},
    {ErrorType::V, "V"},
    {ErrorType::VI, "VI"},
}};

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string primitive_problem(const GeometryPrimitive& g) {
  struct Visitor {
    std::string operator()(const Sphere& s) const {
      if (!s.center.finite()) return "non-finite sphere center";
      if (!finite_positive(s.radius)) return "sphere radius must be positive";
      return {};
    }
    std::string operator()(const Capsule& c) const {
      if (!c.a.finite() || !c.b.finite()) return "non-finite capsule endpoint";
      if (c.a == c.b) return "capsule endpoints must be distinct";
      if (!finite_positive(c.radius)) return "capsule radius must be positive";
      return {};
    }
    std::string operator()(const TriangleMesh& m) const {
      if (m.triangles.empty()) return "mesh needs at least one triangle";
      for (const auto& v : m.vertices) {
        if (!v.finite()) return "non-finite mesh vertex";
      }
      for (const auto& tri : m.triangles) {
        for (auto idx : tri) {
          if (idx >= m.vertices.size()) return "triangle index out of range";
        }
      }
      return {};
    }
  };
  return std::visit(Visitor{}, g);
}

std::string_view to_roman(ErrorType type) { return name_of(kRoman, type); }
std::optional<ErrorType> error_type_from_roman(std::string_view roman) {
  return lookup(kRoman, roman);
}

std::string_view to_string(SimletKind v) { return name_of(kKinds, v); }
std::string_view to_string(SimletFlag v) { return name_of(kFlags, v); }
std::string_view to_string(ToolCapability v) { return name_of(kCaps, v); }
std::string_view to_string(VesselEnd v) { return name_of(kEnds, v); }
std::optional<SimletKind> simlet_kind_from(std::string_view s) { return lookup(kKinds, s); }
std::optional<SimletFlag> simlet_flag_from(std::string_view s) { return lookup(kFlags, s); }
std::optional<ToolCapability> tool_capability_from(std::string_view s) {
  return lookup(kCaps, s);
}
std::optional<VesselEnd> vessel_end_from(std::string_view s) { return lookup(kEnds, s); }

std::string_view event_type_name(const EventBody& body) {
  static constexpr std::array<std::string_view, 8> kNames{
      "toolPose", "forceSample", "clipApplied", "cut",
      "suture",   "detach",      "retrieve",    "sessionEnd"};
  return kNames[body.index()];
}

}  // namespace tips
