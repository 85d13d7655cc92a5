#pragma once

// Random event streams over the golden scene, biased towards the situations
// the rules care about (tips near the common bile duct, forces around the
// cystic duct limit, clips around cut sites).

#include <random>
#include <vector>

#include "tips/model.hpp"

namespace tips::oracle {

class StreamGenerator {
 public:
  explicit StreamGenerator(std::uint64_t seed) : rng_(seed) {}

  std::vector<SimEvent> stream(std::size_t maxEvents = 50) {
    std::size_t n = 1 + pick(maxEvents - 1);
    std::vector<SimEvent> out;
    TimeMs t = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      t += static_cast<TimeMs>(pick(4)) * 50;  // equal timestamps are allowed
      out.push_back({t, body()});
    }
    out.push_back({t + 10, SessionEnd{}});
    return out;
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n)(rng_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& choose(const std::vector<T>& v) {
    return v[pick(v.size() - 1)];
  }

  EventBody body() {
    static const std::vector<std::string> tools{"maryland_dissector", "clip_applier", "scissors",
                                                "grasper"};
    static const std::vector<std::string> anatomy{"common_bile_duct", "cystic_duct", "cystic_artery",
                                                  "fatty_tissue",     "gallbladder", "pouch"};
    static const std::vector<std::string> clippable{"cystic_duct", "cystic_artery"};
    static const std::vector<std::pair<std::string, std::string>> edges{
        {"cystic_duct", "common_bile_duct"}, {"gallbladder", "cystic_duct"},
        {"gallbladder", "cystic_artery"},    {"gallbladder", "fatty_tissue"},
        {"fatty_tissue", "cystic_artery"},   {"pouch", "gallbladder"}};

    double r = uniform(0, 1);
    if (r < 0.40) {
      // Mostly the dissector sweeping near the bile duct axis (x = 0).
      std::string tool = coin(0.8) ? "maryland_dissector" : choose(tools);
      Vec3 tip{uniform(2, 14), uniform(-3, 3), uniform(-10, 110)};
      if (coin(0.2)) tip = {uniform(-20, 60), uniform(-20, 20), uniform(0, 120)};
      return ToolPose{tool, tip, coin(0.7)};
    }
    if (r < 0.60) {
      std::string a = coin(0.8) ? "cystic_duct" : choose(anatomy);
      return ForceSample{a, uniform(0, 3), uniform(0.9, 2.0)};
    }
    if (r < 0.72) return ClipApplied{choose(clippable), uniform(0, 1)};
    if (r < 0.82) {
      std::string a = coin(0.6) ? choose(clippable) : choose(anatomy);
      return Cut{a, uniform(0, 1)};
    }
    if (r < 0.86) return Suture{"gallbladder", {uniform(60, 100), uniform(-10, 10), uniform(95, 125)}};
    if (r < 0.94) {
      const auto& e = choose(edges);
      return coin() ? Detach{e.first, e.second} : Detach{e.second, e.first};
    }
    return Retrieve{coin(0.7) ? "gallbladder" : choose(anatomy), coin(0.7)};
  }

  std::mt19937_64 rng_;
};

}  // namespace tips::oracle
