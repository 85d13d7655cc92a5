#include "tips/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tips/serialize.hpp"

namespace tips {

using nlohmann::json;

namespace {

void check_simlet(const Simlet& s, const std::string& where) {
  if (s.id.empty()) throw CatalogError(where, "simlet id must be nonempty");
  if (s.name.empty()) throw CatalogError(where, "simlet name must be nonempty");
  if (s.geometry.empty()) throw CatalogError(where, "simlet needs at least one geometry primitive");
  for (std::size_t i = 0; i < s.geometry.size(); ++i) {
    auto problem = primitive_problem(s.geometry[i]);
    if (!problem.empty()) throw CatalogError(where + "/geometry/" + std::to_string(i), problem);
  }
  if (s.has(SimletFlag::Clippable) && s.kind != SimletKind::Vessel && s.kind != SimletKind::Duct) {
    throw CatalogError(where, "clippable simlets must be vessels or ducts");
  }
  if (s.has(SimletFlag::Suturable) && s.sutureRegions.empty()) {
    throw CatalogError(where, "suturable simlets must declare suture regions");
  }
  for (std::size_t i = 0; i < s.sutureRegions.size(); ++i) {
    const auto& r = s.sutureRegions[i];
    std::string at = where + "/sutureRegions/" + std::to_string(i);
    if (r.regionId.empty()) throw CatalogError(at, "region id must be nonempty");
    auto problem = primitive_problem(r.geometry);
    if (!problem.empty()) throw CatalogError(at, problem);
  }
  auto positive = [&](const std::optional<double>& v, const char* what) {
    if (v && !(std::isfinite(*v) && *v > 0.0)) {
      throw CatalogError(where, std::string(what) + " must be positive");
    }
  };
  positive(s.youngsModulus, "youngsModulus");
  positive(s.forceThreshold, "forceThreshold");
  positive(s.stretchThreshold, "stretchThreshold");
}

}  // namespace

Catalog Catalog::from_entries(std::vector<Simlet> simlets, std::vector<ToolSpec> tools) {
  Catalog c;
  std::set<std::string> ids;
  auto register_name = [&](const std::string& name, EntryKind kind, const std::string& id,
                           const std::string& where) {
    if (!c.names_.insert(name)) throw CatalogError(where, "duplicate name '" + name + "'");
    c.by_folded_name_[case_fold(name)] = {kind, id};
  };
  for (std::size_t i = 0; i < simlets.size(); ++i) {
    std::string where = "/simlets/" + std::to_string(i);
    check_simlet(simlets[i], where);
    if (!ids.insert(simlets[i].id).second) {
      throw CatalogError(where, "duplicate id '" + simlets[i].id + "'");
    }
    register_name(simlets[i].name, EntryKind::Simlet, simlets[i].id, where);
  }
  for (std::size_t i = 0; i < tools.size(); ++i) {
    std::string where = "/tools/" + std::to_string(i);
    const auto& t = tools[i];
    if (t.id.empty()) throw CatalogError(where, "tool id must be nonempty");
    if (t.name.empty()) throw CatalogError(where, "tool name must be nonempty");
    if (t.capabilities.empty()) throw CatalogError(where, "tool needs at least one capability");
    if (!ids.insert(t.id).second) throw CatalogError(where, "duplicate id '" + t.id + "'");
    register_name(t.name, EntryKind::Tool, t.id, where);
  }
  for (std::size_t i = 0; i < simlets.size(); ++i) {
    for (std::size_t k = 0; k < simlets[i].attachments.size(); ++k) {
      const auto& target = simlets[i].attachments[k];
      bool known = std::any_of(simlets.begin(), simlets.end(),
                               [&](const Simlet& s) { return s.id == target; });
      if (!known) {
        throw CatalogError("/simlets/" + std::to_string(i) + "/attachments/" + std::to_string(k),
                           "dangling attachment '" + target + "'");
      }
      if (target == simlets[i].id) {
        throw CatalogError("/simlets/" + std::to_string(i), "simlet attached to itself");
      }
    }
  }
  for (auto& s : simlets) c.simlets_.emplace(s.id, std::move(s));
  for (auto& t : tools) c.tools_.emplace(t.id, std::move(t));
  return c;
}

const Simlet* Catalog::find_simlet(std::string_view id) const {
  auto it = simlets_.find(std::string(id));
  return it == simlets_.end() ? nullptr : &it->second;
}

const ToolSpec* Catalog::find_tool(std::string_view id) const {
  auto it = tools_.find(std::string(id));
  return it == tools_.end() ? nullptr : &it->second;
}

std::string Catalog::display_name(std::string_view id) const {
  if (const Simlet* s = find_simlet(id)) return s->name;
  if (const ToolSpec* t = find_tool(id)) return t->name;
  return std::string(id);
}

NameResolution Catalog::resolve(std::string_view written) const {
  NameResolution r;
  auto fill = [&](const std::string& display) {
    const auto& [kind, id] = by_folded_name_.at(case_fold(display));
    r.status = NameResolution::Status::Resolved;
    r.kind = kind;
    r.id = id;
    r.display = display;
  };
  if (const std::string* exact = names_.find_exact(written)) {
    fill(*exact);
    return r;
  }
  r.candidates = names_.complete(written);
  if (written.empty() || r.candidates.empty()) {
    r.status = NameResolution::Status::Unknown;
  } else if (r.candidates.size() == 1) {
    fill(r.candidates.front());
  } else {
    r.status = NameResolution::Status::Ambiguous;
  }
  return r;
}

Catalog load_catalog(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw CatalogError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("simlets") || !doc.contains("tools") ||
      !doc["simlets"].is_array() || !doc["tools"].is_array()) {
    throw CatalogError("", "malformed document: expected an object with 'simlets' and 'tools' arrays");
  }
  std::vector<Simlet> simlets;
  std::vector<ToolSpec> tools;
  for (std::size_t i = 0; i < doc["simlets"].size(); ++i) {
    try {
      simlets.push_back(doc["simlets"][i].get<Simlet>());
    } catch (const FormatError& e) {
      throw CatalogError("/simlets/" + std::to_string(i), e.what());
    }
  }
  for (std::size_t i = 0; i < doc["tools"].size(); ++i) {
    try {
      tools.push_back(doc["tools"][i].get<ToolSpec>());
    } catch (const FormatError& e) {
      throw CatalogError("/tools/" + std::to_string(i), e.what());
    }
  }
  return Catalog::from_entries(std::move(simlets), std::move(tools));
}

Catalog load_catalog(std::istream& source) {
  std::stringstream buffer;
  buffer << source.rdbuf();
  return load_catalog(buffer.str());
}

Catalog load_catalog_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CatalogError(path.string(), "cannot open catalog file");
  return load_catalog(in);
}

std::vector<std::string> complete(const Catalog& catalog, std::string_view prefix) {
  return catalog.complete(prefix);
}

bool joins(const AttachmentEdge& e, std::string_view a, std::string_view b) {
  return (e.childId == a && e.parentId == b) || (e.childId == b && e.parentId == a);
}

Scene compose(const Catalog& catalog, const std::vector<std::string>& ids) {
  if (ids.empty()) throw CatalogError("", "scene selection is empty");
  Scene scene;
  for (const auto& id : ids) {
    const Simlet* s = catalog.find_simlet(id);
    if (s == nullptr) throw CatalogError("", "unknown id '" + id + "'");
    if (!scene.instances.emplace(id, *s).second) {
      throw CatalogError("", "duplicate id '" + id + "' in selection");
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [id, simlet] : scene.instances) {
    for (const auto& other : simlet.attachments) {
      if (scene.instances.count(other) == 0) continue;
      auto key = std::minmax(id, other);
      if (!seen.emplace(key.first, key.second).second) continue;
      scene.attachmentGraph.push_back({id, other});
    }
  }
  std::sort(scene.attachmentGraph.begin(), scene.attachmentGraph.end());
  return scene;
}

}  // namespace tips
