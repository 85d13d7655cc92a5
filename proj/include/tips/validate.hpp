#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "tips/catalog.hpp"
#include "tips/model.hpp"
#include "tips/specparse.hpp"

namespace tips {

struct Finding {
  int step = 0;    // 1-based step index, 0 for procedure-level findings
  int column = 0;  // 1-based column within the offending field, 0 if not positional
  std::string field;
  std::string message;
  friend bool operator==(const Finding&, const Finding&) = default;
};

// Pure: an empty result means every id resolves, every invariant holds and
// each step's safety text re-parses to its stored rules.
std::vector<Finding> validate_spec(const ProcedureSpec& spec, const Catalog& catalog);

// Per-step parse findings for a raw document, followed by validate_spec
// findings when every step parsed.
std::vector<Finding> check_spec_document(const SpecDocument& doc, const Catalog& catalog);

// Simlet ids the spec's scene instantiates (sceneIds, or the whole catalog).
std::vector<std::string> scene_ids(const ProcedureSpec& spec, const Catalog& catalog);

void to_json(nlohmann::json& j, const Finding& f);

}  // namespace tips
