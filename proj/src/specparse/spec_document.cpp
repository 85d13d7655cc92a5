#include <fstream>

#include "tips/serialize.hpp"
#include "tips/specparse.hpp"

namespace tips {

using nlohmann::json;

namespace {

std::string optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw FormatError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return optional_string(j, key);
}

std::string where(int step) { return step == 0 ? "header" : "step " + std::to_string(step); }

}  // namespace

SpecBuildError::SpecBuildError(int step_, ParseError cause_)
    : Error(where(step_) + ": " + cause_.what()), step(step_), cause(std::move(cause_)) {}

SpecDocument parse_spec_document(const json& doc) {
  if (!doc.is_object()) throw FormatError("spec document must be a JSON object");
  SpecDocument out;
  out.title = required_string(doc, "title");
  out.catalog = optional_string(doc, "catalog");
  out.completion = required_string(doc, "completion");
  if (auto it = doc.find("scene"); it != doc.end()) {
    if (!it->is_array()) throw FormatError("field 'scene' must be an array of names");
    for (const auto& n : *it) {
      if (!n.is_string()) throw FormatError("field 'scene' must be an array of names");
      out.scene.push_back(n.get<std::string>());
    }
  }
  auto steps = doc.find("steps");
  if (steps == doc.end() || !steps->is_array()) {
    throw FormatError("field 'steps' must be an array");
  }
  for (std::size_t i = 0; i < steps->size(); ++i) {
    const json& s = (*steps)[i];
    try {
      if (!s.is_object()) throw FormatError("a step must be an object");
      out.steps.push_back({required_string(s, "action"), required_string(s, "anatomy"),
                           required_string(s, "tool"), optional_string(s, "safety"),
                           optional_string(s, "comment")});
    } catch (const FormatError& e) {
      throw FormatError("steps[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return out;
}

SpecDocument read_spec_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open spec file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": malformed document: " + e.what());
  }
  return parse_spec_document(doc);
}

json to_document(const SpecDocument& doc) {
  json steps = json::array();
  for (const auto& s : doc.steps) {
    steps.push_back({{"action", s.action},
                     {"anatomy", s.anatomy},
                     {"tool", s.tool},
                     {"safety", s.safety},
                     {"comment", s.comment}});
  }
  json out = {{"title", doc.title},
              {"catalog", doc.catalog},
              {"completion", doc.completion},
              {"steps", steps}};
  if (!doc.scene.empty()) out["scene"] = doc.scene;
  return out;
}

ProcedureSpec build_spec(const SpecDocument& doc, const Catalog& catalog) {
  ProcedureSpec spec;
  spec.title = doc.title;
  spec.catalogRef = doc.catalog;

  std::vector<SafetyRule> completion;
  try {
    completion = parse_safety(doc.completion, catalog);
  } catch (const ParseError& e) {
    ParseError cause = e;
    cause.field = "completion";
    throw SpecBuildError(0, std::move(cause));
  }
  if (completion.size() != 1 || !std::holds_alternative<CompletionRule>(completion.front())) {
    throw SpecBuildError(0, ParseError("completion", 0, 0, {"completion clause"},
                                       "header must hold exactly one completion clause"));
  }
  spec.completionRule = std::get<CompletionRule>(completion.front());

  for (const auto& name : doc.scene) {
    NameResolution r = catalog.resolve(name);
    if (r.status != NameResolution::Status::Resolved || r.kind != EntryKind::Simlet) {
      throw SpecBuildError(0, ParseError("scene", 0, 0, {"anatomy name"},
                                         "unresolved scene entry '" + name + "'"));
    }
    spec.sceneIds.push_back(r.id);
  }

  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    int index = static_cast<int>(i) + 1;
    try {
      spec.steps.push_back(parse_step(doc.steps[i], catalog, index));
    } catch (const ParseError& e) {
      throw SpecBuildError(index, e);
    }
  }
  return spec;
}

SpecDocument to_document(const ProcedureSpec& spec, const Catalog& catalog) {
  SpecDocument doc;
  doc.title = spec.title;
  doc.catalog = spec.catalogRef;
  doc.completion = format_rule(spec.completionRule, catalog);
  for (const auto& id : spec.sceneIds) doc.scene.push_back(catalog.display_name(id));
  for (const auto& step : spec.steps) doc.steps.push_back(format_step(step, catalog));
  return doc;
}

}  // namespace tips
