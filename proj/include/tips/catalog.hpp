#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tips/model.hpp"
#include "tips/name_index.hpp"

namespace tips {

class CatalogError : public Error {
 public:
  CatalogError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

enum class EntryKind { Simlet, Tool };

struct NameResolution {
  enum class Status { Resolved, Unknown, Ambiguous };
  Status status = Status::Unknown;
  EntryKind kind = EntryKind::Simlet;
  std::string id;
  std::string display;
  std::vector<std::string> candidates;
};

/// The simlet database: anatomy pieces and tools, indexed by id and by
/// case-insensitive display-name prefix. Immutable after load.
class Catalog {
 public:
  Catalog() = default;

  // Builds and validates a catalog. Throws CatalogError on any invariant breach.
  static Catalog from_entries(std::vector<Simlet> simlets, std::vector<ToolSpec> tools);

  const std::map<std::string, Simlet>& simlets() const { return simlets_; }
  const std::map<std::string, ToolSpec>& tools() const { return tools_; }

  const Simlet* find_simlet(std::string_view id) const;
  const ToolSpec* find_tool(std::string_view id) const;

  // Display name of a simlet or tool id; the id itself when unknown.
  std::string display_name(std::string_view id) const;

  std::vector<std::string> complete(std::string_view prefix) const { return names_.complete(prefix); }

  // Exact case-insensitive match first, otherwise a unique prefix completion.
  NameResolution resolve(std::string_view written) const;

  const NameIndex& name_index() const { return names_; }

 private:
  std::map<std::string, Simlet> simlets_;
  std::map<std::string, ToolSpec> tools_;
  NameIndex names_;
  std::map<std::string, std::pair<EntryKind, std::string>> by_folded_name_;
};

Catalog load_catalog(std::istream& source);
Catalog load_catalog(std::string_view document);
Catalog load_catalog_file(const std::filesystem::path& path);

std::vector<std::string> complete(const Catalog& catalog, std::string_view prefix);

struct AttachmentEdge {
  std::string childId;
  std::string parentId;
  friend bool operator==(const AttachmentEdge&, const AttachmentEdge&) = default;
  friend auto operator<=>(const AttachmentEdge&, const AttachmentEdge&) = default;
};

// True when the edge joins a and b in either orientation.
bool joins(const AttachmentEdge& e, std::string_view a, std::string_view b);

struct Scene {
  std::map<std::string, Simlet> instances;
  std::vector<AttachmentEdge> attachmentGraph;  // sorted, one entry per undirected pair
  friend bool operator==(const Scene&, const Scene&) = default;
};

// Throws CatalogError on an empty selection, unknown id or duplicate id.
Scene compose(const Catalog& catalog, const std::vector<std::string>& ids);

}  // namespace tips
