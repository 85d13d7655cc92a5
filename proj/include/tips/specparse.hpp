#pragma once

// The five-field step format and the safety-clause language.
//
//   clause     := proximity | force | stretch | clips | foreign | completion | suture
//   safety     := clause { ";" clause }
//   proximity  := "not too close to" NAME [ "(" NUMBER "mm" ")" ]
//   force      := "max force" NUMBER "N on" NAME
//   stretch    := "do not overstretch" NAME [ "(" NUMBER "x" [ "," NUMBER "N" ] ")" ]
//   clips      := "clips:" INT "proximal," INT "distal on" NAME [ "before cut" ]
//   foreign    := "no foreign objects"
//   completion := [ "free and" ] "retrieve" NAME [ "via pouch" ]
//   suture     := "suture only within" REGION "of" NAME
//
// Keywords are case-insensitive. NAME is resolved against the catalog the
// same way auto-completion does: an exact case-insensitive match, or else a
// unique prefix completion.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tips/catalog.hpp"
#include "tips/model.hpp"

namespace tips {

struct ParseError : Error {
  ParseError(std::string field, int column, int token, std::vector<std::string> expected,
             const std::string& message);

  std::string field;  // "action", "anatomy", "tool", "safety", "comment" or "completion"
  int column = 0;     // 1-based byte column within the field text, 0 if not positional
  int token = 0;      // 1-based token index within the field text, 0 if not positional
  std::vector<std::string> expected;
  std::string detail;
};

struct StepFields {
  std::string action;
  std::string anatomy;
  std::string tool;
  std::string safety;
  std::string comment;
  friend bool operator==(const StepFields&, const StepFields&) = default;
};

struct SafetyDefaults {
  static constexpr double kProximityMm = 5.0;
  static constexpr double kVesselForceN = 2.0;
  static constexpr double kTissueForceN = 5.0;
  static constexpr double kStretchRatio = 1.5;
};

double default_force_limit(const Simlet& s);
double default_stretch_limit(const Simlet& s);

// toolId binds proximity clauses to the step's tool; may be empty outside a step.
std::vector<SafetyRule> parse_safety(std::string_view text, const Catalog& catalog,
                                     std::string_view toolId = {});

TaskStep parse_step(const StepFields& fields, const Catalog& catalog, int index = 1);

std::string format_rule(const SafetyRule& rule, const Catalog& catalog);
std::string format_safety(const std::vector<SafetyRule>& rules, const Catalog& catalog);
StepFields format_step(const TaskStep& step, const Catalog& catalog);

// Field-wise equality ignoring the author's original safety text.
bool same_step(const TaskStep& a, const TaskStep& b);

std::string format_number(double v);

// ---------------------------------------------------------------------------
// Spec documents

struct SpecDocument {
  std::string title;
  std::string catalog;
  std::string completion;
  std::vector<std::string> scene;
  std::vector<StepFields> steps;
};

// Throws FormatError when the document does not have the spec file shape.
SpecDocument parse_spec_document(const nlohmann::json& doc);
SpecDocument read_spec_document(const std::filesystem::path& path);
nlohmann::json to_document(const SpecDocument& doc);

struct SpecBuildError : Error {
  SpecBuildError(int step, ParseError cause);
  int step;  // 1-based, 0 for the header
  ParseError cause;
};

// Parses every step; throws SpecBuildError on the first failing field.
ProcedureSpec build_spec(const SpecDocument& doc, const Catalog& catalog);
SpecDocument to_document(const ProcedureSpec& spec, const Catalog& catalog);

// ---------------------------------------------------------------------------
// Instruction pages

struct InstructionPage {
  int stepIndex = 0;
  std::string heading;
  std::string body;
  std::vector<std::string> callouts;
  friend bool operator==(const InstructionPage&, const InstructionPage&) = default;
};

std::string callout_text(const SafetyRule& rule, const Catalog& catalog);
std::vector<InstructionPage> generate_instructions(const ProcedureSpec& spec,
                                                   const Catalog& catalog);
std::string render_markdown(const InstructionPage& page);
// Writes step-NN.md per page; returns the written paths.
std::vector<std::filesystem::path> write_instruction_pages(
    const std::vector<InstructionPage>& pages, const std::filesystem::path& dir);

}  // namespace tips
