#include <cstdio>
#include <fstream>

#include "tips/specparse.hpp"

namespace tips {

std::string callout_text(const SafetyRule& rule, const Catalog& catalog) {
  struct Visitor {
    const Catalog& c;
    std::string operator()(const ProximityRule& r) const {
      return "Keep ≥ " + format_number(r.minDistance) + " mm from " +
             c.display_name(r.protectedAnatomyId);
    }
    std::string operator()(const ForceLimitRule& r) const {
      std::string text = "Apply at most " + format_number(r.maxForce) + " N to " +
                         c.display_name(r.anatomyId);
      if (r.maxStretch) {
        text += " and do not stretch it beyond " + format_number(*r.maxStretch) +
                "x its rest length";
      }
      return text;
    }
    std::string operator()(const NoForeignBodiesRule&) const {
      return "Leave no clips or tools in the patient";
    }
    std::string operator()(const ClipLayoutRule& r) const {
      return "Place " + std::to_string(r.requiredProximal) + " proximal and " +
             std::to_string(r.requiredDistal) + " distal clips on " +
             c.display_name(r.vesselId) + (r.mustPrecedeCut ? " before cutting" : "");
    }
    std::string operator()(const CompletionRule& r) const {
      return std::string(r.mustBeFreed ? "Free and retrieve " : "Retrieve ") +
             c.display_name(r.targetAnatomyId) +
             (r.mustBeRetrievedViaPouch ? " via the pouch" : "");
    }
    std::string operator()(const SutureRegionRule& r) const {
      return "Suture " + c.display_name(r.anatomyId) + " only within " + r.regionId;
    }
  };
  return std::visit(Visitor{catalog}, rule);
}

std::vector<InstructionPage> generate_instructions(const ProcedureSpec& spec,
                                                   const Catalog& catalog) {
  std::vector<InstructionPage> pages;
  pages.reserve(spec.steps.size());
  for (const auto& step : spec.steps) {
    InstructionPage page;
    page.stepIndex = step.index;
    page.heading = "Step " + std::to_string(step.index);
    if (!step.comment.empty()) page.heading += ": " + step.comment;
    page.body = step.action + " " + catalog.display_name(step.anatomyId) + " using " +
                catalog.display_name(step.toolId);
    for (const auto& rule : step.safety) page.callouts.push_back(callout_text(rule, catalog));
    pages.push_back(std::move(page));
  }
  return pages;
}

std::string render_markdown(const InstructionPage& page) {
  std::string md = "# " + page.heading + "\n\n" + page.body + "\n";
  if (!page.callouts.empty()) {
    md += "\n## Safety\n\n";
    for (const auto& c : page.callouts) md += "- " + c + "\n";
  }
  return md;
}

std::vector<std::filesystem::path> write_instruction_pages(
    const std::vector<InstructionPage>& pages, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& page : pages) {
    char name[32];
    std::snprintf(name, sizeof name, "step-%02d.md", page.stepIndex);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << render_markdown(page);
    written.push_back(path);
  }
  return written;
}

}  // namespace tips
