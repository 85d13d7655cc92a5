#include <algorithm>

#include "tips/harness.hpp"

namespace tips {

namespace {

// Simlet and tool ids of the golden catalog.
constexpr const char* kCysticDuct = "cystic_duct";
constexpr const char* kCysticArtery = "cystic_artery";
constexpr const char* kFattyTissue = "fatty_tissue";
constexpr const char* kGallbladder = "gallbladder";
constexpr const char* kDissector = "maryland_dissector";
constexpr const char* kClipApplier = "clip_applier";
constexpr const char* kScissors = "scissors";
constexpr const char* kGrasper = "grasper";

constexpr TimeMs kTick = 100;

class Script {
 public:
  void emit(EventBody body) {
    t_ += kTick;
    events_.push_back(SimEvent{t_, std::move(body)});
  }
  void pose(const char* tool, Vec3 tip, bool activated) { emit(ToolPose{tool, tip, activated}); }
  void path(const char* tool, const std::vector<Vec3>& tips, bool activated) {
    for (const auto& p : tips) pose(tool, p, activated);
  }
  std::vector<SimEvent> finish() {
    emit(SessionEnd{});
    return std::move(events_);
  }

 private:
  TimeMs t_ = 0;
  std::vector<SimEvent> events_;
};

struct Variant {
  bool dipNearBileDuct = false;
  bool forceRamp = false;
  bool strandArteryClip = false;
  bool missingClip = false;
  bool skipRetrieve = false;
  bool suture = false;
  bool sutureOutside = false;
};

std::vector<SimEvent> script(const Variant& v) {
  Script s;

  // Step 1: approach the triangle of Calot and dissect the fatty tissue.
  s.path(kDissector, {{60, 30, 95}, {40, 15, 92}, {25, 5, 92}}, false);
  if (v.dipNearBileDuct) {
    // Activated sweep towards the common bile duct (axis x = 0, radius 4).
    s.path(kDissector, {{12, 0, 50}, {9, 0, 50}, {7, 0, 50}, {9, 0, 50}, {12, 0, 50}}, true);
    s.pose(kDissector, {25, 5, 92}, false);
  }
  s.path(kDissector, {{25, 5, 86}, {25, 5, 84}, {24, 6, 83}, {25, 5, 84}}, true);
  s.emit(ForceSample{kCysticDuct, 0.4, 1.02});
  s.emit(ForceSample{kCysticDuct, 0.8, 1.05});
  if (v.forceRamp) {
    s.emit(ForceSample{kCysticDuct, 1.5, 1.08});
    s.emit(ForceSample{kCysticDuct, 2.5, 1.12});
    s.emit(ForceSample{kCysticDuct, 2.0, 1.10});
    s.emit(ForceSample{kCysticDuct, 1.0, 1.05});
  }
  s.emit(ForceSample{kCysticDuct, 0.5, 1.02});
  s.path(kDissector, {{25, 5, 92}, {60, 30, 95}}, false);

  // Step 2: clip the cystic duct, two proximal and one distal of the cut site.
  s.path(kClipApplier, {{60, 30, 90}, {20, 4, 70}}, false);
  s.emit(ClipApplied{kCysticDuct, 0.2});
  if (!v.missingClip) s.emit(ClipApplied{kCysticDuct, 0.35});
  s.emit(ClipApplied{kCysticDuct, 0.7});
  if (v.strandArteryClip) {
    s.pose(kClipApplier, {19, 14, 80}, false);
    s.emit(ClipApplied{kCysticArtery, 0.3});
  }
  s.pose(kClipApplier, {60, 30, 90}, false);

  // Step 3: divide the cystic duct between the clips.
  s.path(kScissors, {{60, 30, 90}, {23, 4, 72}}, false);
  s.emit(Cut{kCysticDuct, 0.5});
  if (v.strandArteryClip) {
    s.pose(kScissors, {13, 14, 77}, false);
    s.emit(Cut{kCysticArtery, 0.1});
  }
  s.pose(kScissors, {60, 30, 90}, false);

  // Optional suture step on the gallbladder fundus (region centred at (80,0,110), r = 8).
  if (v.suture) {
    s.path(kGrasper, {{90, 20, 120}, {80, 0, 118}}, false);
    if (v.sutureOutside) s.emit(Suture{kGallbladder, {80, 0, 125}});
    s.emit(Suture{kGallbladder, {80, 0, 112}});
  }

  // Step 4: free the gallbladder and bag it.
  s.path(kGrasper, {{90, 20, 120}, {60, 0, 97}}, false);
  s.emit(Detach{kGallbladder, kCysticDuct});
  s.emit(Detach{kGallbladder, kCysticArtery});
  s.emit(Detach{kGallbladder, kFattyTissue});
  s.path(kGrasper, {{80, 20, 80}, {100, 40, 60}}, false);
  if (!v.skipRetrieve) s.emit(Retrieve{kGallbladder, true});
  return s.finish();
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"clean", "errI",  "errII", "errIII",
                                              "errIV", "errV", "errVI"};
  return names;
}

std::string scenario_spec_file(std::string_view name) {
  return name == "errVI" ? "cholecystectomy_suture.json" : "cholecystectomy.json";
}

Trajectory gen_scenario(std::string_view name) {
  const auto& names = scenario_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error("unknown scenario '" + std::string(name) + "'");

  Variant v;
  if (name == "errI") v.dipNearBileDuct = true;
  if (name == "errII") v.forceRamp = true;
  if (name == "errIII") v.strandArteryClip = true;
  if (name == "errIV") v.missingClip = true;
  if (name == "errV") v.skipRetrieve = true;
  if (name == "errVI") v.suture = v.sutureOutside = true;

  Trajectory t;
  t.header.specRef = scenario_spec_file(name);
  t.header.catalogRef = "catalog.json";
  t.header.sessionSeed = 1000 + static_cast<std::uint64_t>(it - names.begin());
  t.events = script(v);
  return t;
}

}  // namespace tips
