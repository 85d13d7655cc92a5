#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "support.hpp"
#include "tips/harness.hpp"
#include "tips/serialize.hpp"
#include "tips/service.hpp"

using namespace tips;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A service on an ephemeral localhost port for the duration of a test.
class Running {
 public:
  explicit Running(const fs::path& root, bool wal = false) {
    ServiceOptions options;
    options.outDir = root / "sessions";
    if (wal) options.walDir = root / "wal";
    service_ = std::make_unique<Service>(test::golden_catalog(), options);
    if (wal) recovered_ = service_->recover();
    port_ = service_->bind("127.0.0.1", 0);
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_->run(); });
    for (int i = 0; i < 200 && !service_->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    REQUIRE(service_->running());
  }
  ~Running() {
    service_->stop();
    thread_.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
  Service& service() { return *service_; }
  std::size_t recovered() const { return recovered_; }

 private:
  std::unique_ptr<Service> service_;
  std::thread thread_;
  int port_ = -1;
  std::size_t recovered_ = 0;
};

std::string spec_body(const fs::path& path = test::golden_spec_path()) { return slurp(path); }

std::string create_session(httplib::Client& c, std::uint64_t seed, const std::string& body = spec_body()) {
  auto res = c.Post("/session?seed=" + std::to_string(seed), body, "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  return json::parse(res->body).at("sessionId").get<std::string>();
}

std::string events_text(const std::vector<SimEvent>& events) {
  std::string out;
  for (const auto& e : events) out += event_line(e) + "\n";
  return out;
}

}  // namespace

TEST_CASE("catalog completion and spec validation endpoints") {
  test::TempDir dir;
  Running server(dir.path());
  auto c = server.client();

  auto res = c.Get("/catalog/complete?prefix=cy");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body) == json::array({"Cystic artery", "Cystic duct"}));
  CHECK(json::parse(c.Get("/catalog/complete?prefix=")->body).size() == 10);
  CHECK(c.Get("/catalog/complete")->status == 400);

  res = c.Post("/spec/validate", spec_body(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body) == json::array());

  json doc = json::parse(spec_body());
  doc["steps"][2]["safety"] = "no foreign bodies";
  res = c.Post("/spec/validate", doc.dump(), "application/json");
  CHECK(res->status == 200);
  auto findings = json::parse(res->body);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0]["step"] == 3);
  CHECK(findings[0]["column"] == 12);

  CHECK(c.Post("/spec/validate", "{nope", "application/json")->status == 400);
}

TEST_CASE("session lifecycle") {
  test::TempDir dir;
  Running server(dir.path());
  auto c = server.client();

  std::string id = create_session(c, 1001);
  CHECK(id == make_session_id(1001));
  CHECK(c.Post("/session?seed=1001", spec_body(), "application/json")->status == 409);
  CHECK(c.Post("/session?seed=abc", spec_body(), "application/json")->status == 400);

  json invalid = json::parse(spec_body());
  invalid["steps"][0]["anatomy"] = "Liver";
  auto res = c.Post("/session", invalid.dump(), "application/json");
  CHECK(res->status == 422);
  CHECK_FALSE(json::parse(res->body).at("findings").empty());

  Trajectory t = gen_scenario("errI");
  std::vector<SimEvent> body(t.events.begin(), t.events.end() - 1);

  CHECK(c.Get("/session/" + id + "/report")->status == 409);

  res = c.Post("/session/" + id + "/events", events_text(body), "application/x-ndjson");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto out = json::parse(res->body);
  CHECK(out["accepted"] == body.size());
  CHECK(out["alerts"].size() == 1);
  CHECK(out["alerts"][0]["kind"] == "toolTipRed");
  REQUIRE(out["violations"].size() == 1);
  CHECK(out["violations"][0]["errorType"] == "I");
  CHECK(out["finalized"] == false);

  // Going back in time is rejected; nothing from that batch is applied.
  res = c.Post("/session/" + id + "/events", event_line({0, SessionEnd{}}) + "\n", "application/x-ndjson");
  CHECK(res->status == 422);
  CHECK(json::parse(res->body)["accepted"] == 0);

  res = c.Post("/session/" + id + "/events", "{\"t\": 99999}\n", "application/x-ndjson");
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["line"] == 1);

  res = c.Post("/session/" + id + "/end", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  SessionReport report = json::parse(res->body).get<SessionReport>();
  CHECK(report.sessionId == id);
  CHECK_FALSE(report.proficient);

  // End is idempotent, the report is retrievable, and the session is closed.
  CHECK(json::parse(c.Post("/session/" + id + "/end", "", "application/json")->body).get<SessionReport>() == report);
  CHECK(json::parse(c.Get("/session/" + id + "/report")->body).get<SessionReport>() == report);
  CHECK(c.Post("/session/" + id + "/events", events_text({t.events.back()}), "application/x-ndjson")->status == 409);

  const std::string& base = report.violations.at(0).snapshotBaseName;
  res = c.Get("/session/" + id + "/snapshots/" + base + ".svg");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "image/svg+xml");
  CHECK(res->body.find("<svg") != std::string::npos);
  res = c.Get("/session/" + id + "/snapshots/" + base + ".json");
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("violation").get<Violation>() == report.violations[0]);
  CHECK(c.Get("/session/" + id + "/snapshots/report.json")->status == 404);
  CHECK(c.Get("/session/" + id + "/snapshots/00000001ms_typeI_1p0mm.svg")->status == 404);

  CHECK(c.Get("/session/nope/report")->status == 404);
  CHECK(c.Post("/session/nope/events", "", "application/x-ndjson")->status == 404);
  CHECK(c.Post("/session/nope/end", "", "application/json")->status == 404);
}

TEST_CASE("events after sessionEnd in the same batch") {
  test::TempDir dir;
  Running server(dir.path());
  auto c = server.client();
  std::string id = create_session(c, 5);
  std::vector<SimEvent> events{{0, SessionEnd{}}, {10, SessionEnd{}}};
  auto res = c.Post("/session/" + id + "/events", events_text(events), "application/x-ndjson");
  CHECK(res->status == 409);
  auto out = json::parse(res->body);
  CHECK(out["accepted"] == 1);
  CHECK(out["finalized"] == true);
  // The end-of-session check was reported with the sessionEnd.
  CHECK(out["violations"].size() == 1);
}

TEST_CASE("interleaved sessions match offline replays") {
  test::TempDir dir;
  Running server(dir.path());
  auto c = server.client();

  std::vector<std::string> names = scenario_names();
  std::map<std::string, std::string> ids;
  std::map<std::string, std::size_t> cursor;
  for (const auto& name : names) {
    fs::path spec = test::data_dir() / scenario_spec_file(name);
    ids[name] = create_session(c, gen_scenario(name).header.sessionSeed, spec_body(spec));
  }
  // Round-robin chunks of three events across all sessions.
  bool pending = true;
  while (pending) {
    pending = false;
    for (const auto& name : names) {
      const auto& events = gen_scenario(name).events;
      std::size_t& at = cursor[name];
      if (at >= events.size()) continue;
      std::size_t end = std::min(at + 3, events.size());
      std::vector<SimEvent> chunk(events.begin() + static_cast<std::ptrdiff_t>(at),
                                  events.begin() + static_cast<std::ptrdiff_t>(end));
      auto res = c.Post("/session/" + ids[name] + "/events", events_text(chunk), "application/x-ndjson");
      REQUIRE(res);
      CHECK(res->status == 200);
      at = end;
      pending = true;
    }
  }

  for (const auto& name : names) {
    CAPTURE(name);
    auto res = c.Post("/session/" + ids[name] + "/end", "", "application/json");
    REQUIRE(res);
    SessionReport online = json::parse(res->body).get<SessionReport>();
    SessionReport offline = replay(test::spec_for_scenario(name), gen_scenario(name), dir.path() / "offline");
    CHECK(online == offline);
  }
}

TEST_CASE("concurrent clients") {
  test::TempDir dir;
  Running server(dir.path());
  std::vector<std::thread> workers;
  std::vector<int> ok(8, 0);
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([&, w] {
      auto c = server.client();
      auto res = c.Post("/session?seed=" + std::to_string(700 + w), spec_body(), "application/json");
      if (!res || res->status != 201) return;
      std::string id = json::parse(res->body).at("sessionId");
      for (const auto& e : gen_scenario("clean").events) {
        auto r = c.Post("/session/" + id + "/events", event_line(e) + "\n", "application/x-ndjson");
        if (!r || r->status != 200) return;
      }
      auto end = c.Post("/session/" + id + "/end", "", "application/json");
      if (end && end->status == 200 && json::parse(end->body).at("proficient") == true) ok[w] = 1;
    });
  }
  for (auto& t : workers) t.join();
  CHECK(std::count(ok.begin(), ok.end(), 1) == 8);
  CHECK(server.service().session_count() == 8);
}

TEST_CASE("sessions survive a restart through the write-ahead log") {
  test::TempDir dir;
  Trajectory t = gen_scenario("errIV");
  std::string openId, closedId;
  SessionReport closedReport;
  {
    Running server(dir.path(), true);
    auto c = server.client();
    openId = create_session(c, 11);
    closedId = create_session(c, 12);
    std::vector<SimEvent> head(t.events.begin(), t.events.begin() + 10);
    CHECK(c.Post("/session/" + openId + "/events", events_text(head), "application/x-ndjson")->status == 200);
    CHECK(c.Post("/session/" + closedId + "/events", events_text(t.events), "application/x-ndjson")->status == 200);
    closedReport = json::parse(c.Post("/session/" + closedId + "/end", "", "application/json")->body);
  }
  // A torn final line in the log (as from a crash) is ignored.
  {
    std::ofstream log(dir.path() / "wal" / (openId + ".jsonl"), std::ios::app);
    log << "{\"t\": 12";
  }

  Running server(dir.path(), true);
  CHECK(server.recovered() == 2);
  auto c = server.client();
  CHECK(json::parse(c.Get("/session/" + closedId + "/report")->body).get<SessionReport>() == closedReport);

  std::vector<SimEvent> tail(t.events.begin() + 10, t.events.end());
  auto res = c.Post("/session/" + openId + "/events", events_text(tail), "application/x-ndjson");
  REQUIRE(res);
  CHECK(res->status == 200);
  SessionReport resumed = json::parse(c.Post("/session/" + openId + "/end", "", "application/json")->body);
  SessionReport offline = replay(test::golden_spec(), t, dir.path() / "offline", 11);
  CHECK(resumed == offline);
}
