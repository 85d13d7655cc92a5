// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <thread>

#include "geom_oracle.hpp"
#include "httplib.h"
#include "monitor_oracle.hpp"
#include "random_streams.hpp"
#include "support.hpp"
#include "tips/geom.hpp"
#include "tips/harness.hpp"
#include "tips/serialize.hpp"
#include "tips/service.hpp"

using namespace tips;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Thrown by require() to fail the current criterion with a reason.
struct Failed {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string events_text(const std::vector<SimEvent>& events) {
  std::string out;
  for (const auto& e : events) out += event_line(e) + "\n";
  return out;
}

// Report JSON with the session id replaced, so reports from different
// sessions can be compared.
std::string without_id(const SessionReport& r) {
  std::string text = report_json_text(r);
  for (std::size_t at; (at = text.find(r.sessionId)) != std::string::npos;) text.replace(at, r.sessionId.size(), "<id>");
  return text;
}

// ---------------------------------------------------------------------------

std::string ac1() {
  test::TempDir out;
  double slowest = 0;
  for (const auto& name : scenario_names()) {
    auto start = std::chrono::steady_clock::now();
    SessionReport r = replay(test::spec_for_scenario(name), gen_scenario(name), out.path());
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slowest = std::max(slowest, secs);
    require(secs < 1.0, name + " took " + std::to_string(secs) + " s");
    if (name == "clean") {
      require(r.violations.empty() && r.proficient, "clean is not a proficient, violation-free run");
      continue;
    }
    require(r.violations.size() == 1, name + " produced " + std::to_string(r.violations.size()) + " violations");
    std::string expected = name.substr(3);
    require(to_roman(r.violations[0].errorType) == expected,
            name + " produced type " + std::string(to_roman(r.violations[0].errorType)));
  }
  std::ostringstream msg;
  msg << "7 scenarios as expected, slowest " << static_cast<int>(slowest * 1000) << " ms";
  return msg.str();
}

std::string ac2() {
  const Catalog& c = test::golden_catalog();
  StepFields fields{"dissect", "Fatty tissue over the cystic ductus and cystic artery", "Curved Maryland Dissector",
                    "not too close to Common bile duct", ""};
  TaskStep step = parse_step(fields, c);
  require(step.safety.size() == 1, "expected one rule");
  const auto* p = std::get_if<ProximityRule>(&step.safety[0]);
  require(p != nullptr, "rule is not a proximity rule");
  require(p->protectedAnatomyId == "common_bile_duct", "protected anatomy is " + p->protectedAnatomyId);
  require(p->toolId == "maryland_dissector", "rule bound to " + p->toolId);
  TaskStep again = parse_step(format_step(step, c), c);
  require(same_step(again, step), "format/parse round trip differs");
  require(format_step(again, c) == format_step(step, c), "canonical text is not a fixpoint");
  return "Proximity(maryland_dissector, common_bile_duct, 5 mm); round trip exact";
}

std::string ac3() {
  using geom::dist_point_capsule;
  double forced = dist_point_capsule({7, 0, 50}, {0, 0, 0}, {0, 0, 100}, 4);
  require(std::abs(forced - 3.0) <= 1e-9, "forced capsule case gave " + std::to_string(forced));

  std::mt19937_64 rng(2024);
  auto real = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto vec = [&](double r) { return Vec3{real(-r, r), real(-r, r), real(-r, r)}; };
  double worst = 0;
  int pairs = 0;
  while (pairs < 1000) {
    GeometryPrimitive g;
    switch (rng() % 3) {
      case 0: g = Sphere{vec(20), real(1, 10)}; break;
      case 1: {
        Vec3 a = vec(20);
        g = Capsule{a, a + vec(15), real(0.5, 6)};
        break;
      }
      default: g = TriangleMesh{{vec(15), vec(15), vec(15), vec(15)}, {{0, 1, 2}, {1, 2, 3}}};
    }
    Vec3 p = vec(35);
    // Keep points off the surface itself, where a finite sample set cannot
    // resolve the distance to the required precision.
    double gap;
    if (const auto* s = std::get_if<Sphere>(&g)) {
      gap = std::abs(norm(p - s->center) - s->radius);
    } else if (const auto* cap = std::get_if<Capsule>(&g)) {
      gap = std::abs(geom::dist_point_segment(p, cap->a, cap->b) - cap->radius);
    } else {
      gap = geom::dist_point_mesh(p, std::get<TriangleMesh>(g));
    }
    if (gap < 0.5) continue;
    double err = std::abs(geom::dist_point_primitive(p, g) - oracle::oracle_distance(p, g, 100000));
    worst = std::max(worst, err);
    require(err <= 0.05, "pair " + std::to_string(pairs) + " differs by " + std::to_string(err) + " mm");
    ++pairs;
  }
  std::ostringstream msg;
  msg << "1000 pairs, max deviation " << worst << " mm; forced case " << forced << " mm";
  return msg.str();
}

std::string ac4() {
  const auto& loaded = *test::golden_spec();
  oracle::MonitorOracle oracle(loaded.spec, loaded.scene);
  std::size_t total = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto events = oracle::StreamGenerator(seed).stream(50);
    require(events.size() <= 50, "stream too long");
    MonitorSet ms = compile_monitors(loaded.spec, loaded.scene, loaded.catalog);
    std::vector<oracle::Finding> got;
    for (const auto& e : events) {
      for (const auto& o : ms.step(e)) {
        if (const auto* v = std::get_if<Violation>(&o)) got.push_back(oracle::finding_of(*v));
      }
    }
    std::sort(got.begin(), got.end());
    auto want = oracle.run(events);
    require(got == want, "stream " + std::to_string(seed) + ": engine " + std::to_string(got.size()) +
                             " violations, oracle " + std::to_string(want.size()));
    total += got.size();
  }
  return "200/200 streams agree (" + std::to_string(total) + " violations)";
}

std::string ac5() {
  const auto& loaded = *test::golden_spec();
  // Tip x(t) on the line y = 0, z = 50; the duct wall is at x = 4 and the limit 5 mm.
  auto x_at = [](TimeMs t) {
    if (t < 3000) return 20.0 - 13.0 * static_cast<double>(t) / 3000.0;  // approach to 3 mm
    if (t < 6000) return 7.0;                                             // dwell
    return 7.0 + 13.0 * static_cast<double>(t - 6000) / 3000.0;           // retreat
  };
  std::string counts;
  for (TimeMs dt : {10, 100, 1000}) {
    MonitorSet ms = compile_monitors(loaded.spec, loaded.scene, loaded.catalog);
    for (TimeMs t = 0; t <= 9000; t += dt) ms.step({t, ToolPose{"maryland_dissector", {x_at(t), 0, 50}, true}});
    std::size_t typeI = 0;
    for (const auto& v : ms.violations()) typeI += v.errorType == ErrorType::I ? 1 : 0;
    require(typeI == 1, std::to_string(dt) + " ms sampling gave " + std::to_string(typeI) + " type I");
    counts += (counts.empty() ? "" : ", ") + std::to_string(dt) + " ms: 1";
  }
  return counts;
}

std::string ac6() {
  const auto& loaded = *test::golden_spec();
  auto run = [&](std::vector<double> clips, double cutAt) {
    MonitorSet ms = compile_monitors(loaded.spec, loaded.scene, loaded.catalog);
    TimeMs t = 0;
    for (double c : clips) ms.step({t += 100, ClipApplied{"cystic_duct", c}});
    ms.step({t += 100, Cut{"cystic_duct", cutAt}});
    return ms;
  };

  MonitorSet good = run({0.2, 0.35, 0.7}, 0.5);
  require(good.violations().empty(), "proper layout produced a violation");

  MonitorSet missing = run({0.2, 0.7}, 0.5);
  require(missing.violations().size() == 1, "expected one violation for {0.2, 0.7}");
  const Violation& iv = missing.violations()[0];
  require(iv.errorType == ErrorType::IV, "expected type IV");
  require(iv.measured == std::vector<Quantity>{{1, "prox"}, {1, "dist"}}, "measured is not (1, 1)");

  MonitorSet stranded = run({0.2, 0.35, 0.7}, 0.1);
  std::size_t dropped = stranded.dropped_clips().size();
  FinalizeResult fin = stranded.finalize();
  std::size_t typeIII = 0;
  for (const auto& v : fin.violations) typeIII += v.errorType == ErrorType::III ? 1 : 0;
  require(dropped == 3, "expected 3 stranded clips, got " + std::to_string(dropped));
  require(typeIII == dropped, "finalize emitted " + std::to_string(typeIII) + " type III");
  return "no violation; IV (1,1); 3 stranded clips -> 3 type III";
}

std::string ac7() {
  test::TempDir a, b;
  std::size_t names = 0;
  std::uint64_t seed = 4242;
  for (const auto& name : scenario_names()) {
    Trajectory t = gen_scenario(name);
    ++seed;
    SessionReport ra = replay(test::spec_for_scenario(name), t, a.path(), seed);
    SessionReport rb = replay(test::spec_for_scenario(name), t, b.path(), seed);
    fs::path da = a.path() / ra.sessionId, db = b.path() / rb.sessionId;
    require(slurp(da / "report.json") == slurp(db / "report.json"), name + ": report.json differs");

    auto listing = [](const fs::path& dir) {
      std::set<std::string> out;
      if (fs::exists(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
      }
      return out;
    };
    auto sa = listing(da / "snapshots");
    require(sa == listing(db / "snapshots"), name + ": snapshot names differ");
    require(sa.size() == 2 * ra.violations.size(), name + ": expected two files per violation");

    for (const auto& v : ra.violations) {
      for (const char* ext : {".svg", ".json"}) {
        std::string file = v.snapshotBaseName + ext;
        require(sa.count(file) == 1, name + ": missing " + file);
        require(std::regex_match(file, snapshot_name_regex()), file + " fails the regex");
        auto parsed = parse_snapshot_name(file);
        require(parsed && parsed->t == v.t && parsed->type == v.errorType, file + " does not parse back");
        require(parsed->values.size() == v.measured.size(), file + ": value count differs");
        for (std::size_t k = 0; k < v.measured.size(); ++k) {
          require(parsed->values[k].unit == v.measured[k].unit &&
                      std::abs(parsed->values[k].value - v.measured[k].value) <= 5e-4,
                  file + ": value does not parse back");
        }
        ++names;
      }
    }
  }
  return "7 scenarios byte-identical; " + std::to_string(names) + " snapshot names parse back";
}

// Runs the CLI on a trajectory file and returns the report it wrote.
SessionReport cli_replay(const fs::path& trajectory, const fs::path& out) {
  std::string cmd = std::string("\"") + TIPS_CLI_PATH + "\" check --quiet --out \"" + out.string() + "\" \"" +
                    trajectory.string() + "\" 2>/dev/null";
  int status = std::system(cmd.c_str());
  require(WIFEXITED(status) && WEXITSTATUS(status) <= 1, "CLI check failed on " + trajectory.string());
  Trajectory t = read_trajectory(trajectory);
  return json::parse(slurp(out / make_session_id(t.header.sessionSeed) / "report.json")).get<SessionReport>();
}

std::string ac8() {
  test::TempDir dir;
  ServiceOptions options;
  options.outDir = dir.path() / "service";
  Service service(test::golden_catalog(), options);
  int port = service.bind("127.0.0.1", 0);
  require(port > 0, "cannot bind a local port");
  std::thread server([&] { service.run(); });
  struct Join {
    Service& s;
    std::thread& t;
    ~Join() {
      s.stop();
      t.join();
    }
  } join{service, server};
  for (int i = 0; i < 200 && !service.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  httplib::Client c("127.0.0.1", port);
  const std::string specText = slurp(test::golden_spec_path());

  auto open = [&]() {
    auto res = c.Post("/session", specText, "application/json");
    require(res && res->status == 201, "session creation failed");
    return json::parse(res->body).at("sessionId").get<std::string>();
  };
  auto post = [&](const std::string& id, const std::vector<SimEvent>& events) {
    return c.Post("/session/" + id + "/events", events_text(events), "application/x-ndjson");
  };
  auto end = [&](const std::string& id) {
    auto res = c.Post("/session/" + id + "/end", "", "application/json");
    require(res && res->status == 200, "end failed");
    return json::parse(res->body).get<SessionReport>();
  };

  std::map<std::string, SessionReport> isolated;
  for (const char* name : {"clean", "errII"}) {
    Trajectory t = gen_scenario(name);
    fs::path file = dir.path() / (std::string(name) + ".jsonl");
    write_trajectory(t, file);
    SessionReport viaCli = cli_replay(file, dir.path() / "cli");

    std::string id = open();
    auto res = post(id, t.events);
    require(res && res->status == 200, std::string(name) + ": events rejected");
    SessionReport viaHttp = end(id);
    require(without_id(viaHttp) == without_id(viaCli), std::string(name) + ": service report differs from CLI");
    isolated[name] = viaHttp;

    auto after = post(id, {t.events.back()});
    require(after && after->status == 409, std::string(name) + ": events after /end not rejected with 409");
  }

  // Interleave the two sessions event by event.
  Trajectory clean = gen_scenario("clean"), errII = gen_scenario("errII");
  std::string a = open(), b = open();
  std::size_t n = std::max(clean.events.size(), errII.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i < clean.events.size()) require(post(a, {clean.events[i]})->status == 200, "interleaved clean rejected");
    if (i < errII.events.size()) require(post(b, {errII.events[i]})->status == 200, "interleaved errII rejected");
  }
  require(without_id(end(a)) == without_id(isolated["clean"]), "interleaved clean differs from isolated run");
  require(without_id(end(b)) == without_id(isolated["errII"]), "interleaved errII differs from isolated run");
  return "clean and errII equal to CLI replay; 409 after /end; interleaved sessions equal isolated runs";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"AC1 scenario suite", ac1},        {"AC2 golden clause parse", ac2}, {"AC3 geometry oracle", ac3},
      {"AC4 monitor vs oracle", ac4},     {"AC5 debounce", ac5},             {"AC6 clip semantics", ac6},
      {"AC7 determinism", ac7},           {"AC8 service equivalence", ac8}};
  int failures = 0;
  for (const auto& [label, check] : criteria) {
    std::string detail;
    bool ok = false;
    try {
      detail = check();
      ok = true;
    } catch (const Failed& f) {
      detail = f.why;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << label << ": " << detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
