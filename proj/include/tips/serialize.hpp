#pragma once

// JSON encodings of the domain types. Field names are normative; see
// docs/formats.md. Decoders throw FormatError naming the offending field.

#include "json.hpp"

#include "tips/model.hpp"

namespace tips {

class FormatError : public Error {
 public:
  using Error::Error;
};

void to_json(nlohmann::json& j, const Vec3& v);
void from_json(const nlohmann::json& j, Vec3& v);
void to_json(nlohmann::json& j, const GeometryPrimitive& g);
void from_json(const nlohmann::json& j, GeometryPrimitive& g);
void to_json(nlohmann::json& j, const SutureRegionDef& r);
void from_json(const nlohmann::json& j, SutureRegionDef& r);
void to_json(nlohmann::json& j, const Simlet& s);
void from_json(const nlohmann::json& j, Simlet& s);
void to_json(nlohmann::json& j, const ToolSpec& t);
void from_json(const nlohmann::json& j, ToolSpec& t);
void to_json(nlohmann::json& j, const SafetyRule& r);
void from_json(const nlohmann::json& j, SafetyRule& r);
void to_json(nlohmann::json& j, const CompletionRule& r);
void from_json(const nlohmann::json& j, CompletionRule& r);
void to_json(nlohmann::json& j, const TaskStep& s);
void from_json(const nlohmann::json& j, TaskStep& s);
void to_json(nlohmann::json& j, const ProcedureSpec& s);
void from_json(const nlohmann::json& j, ProcedureSpec& s);
void to_json(nlohmann::json& j, const SimEvent& e);
void from_json(const nlohmann::json& j, SimEvent& e);
void to_json(nlohmann::json& j, const Quantity& q);
void from_json(const nlohmann::json& j, Quantity& q);
void to_json(nlohmann::json& j, const Violation& v);
void from_json(const nlohmann::json& j, Violation& v);
void to_json(nlohmann::json& j, const Achievement& a);
void from_json(const nlohmann::json& j, Achievement& a);
void to_json(nlohmann::json& j, const SessionReport& r);
void from_json(const nlohmann::json& j, SessionReport& r);

}  // namespace tips
