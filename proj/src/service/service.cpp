#include "tips/service.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "tips/harness.hpp"
#include "tips/serialize.hpp"
#include "tips/validate.hpp"

namespace tips {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses a spec document body; nullopt (with the reason) when it is not one.
std::optional<SpecDocument> parse_document(const std::string& body, std::string& why) {
  try {
    return parse_spec_document(json::parse(body));
  } catch (const json::exception& e) {
    why = std::string("body is not JSON: ") + e.what();
  } catch (const FormatError& e) {
    why = e.what();
  }
  return std::nullopt;
}

}  // namespace

struct Service::Impl {
  struct Session {
    std::mutex mutex;
    SessionRunner runner;
    Session(std::shared_ptr<const LoadedSpec> spec, std::string id, std::filesystem::path out)
        : runner(std::move(spec), std::move(id), std::move(out)) {}
  };

  Catalog catalog;
  ServiceOptions options;
  httplib::Server server;
  mutable std::shared_mutex sessionsMutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  Impl(Catalog c, ServiceOptions o) : catalog(std::move(c)), options(std::move(o)) {
    int threads = options.threads > 0 ? options.threads : 1;
    server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    routes();
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessionsMutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::filesystem::path wal(const std::string& id, const char* suffix) const {
    return *options.walDir / (id + suffix);
  }

  void wal_append(const std::string& id, const char* suffix, const std::string& text) const {
    if (!options.walDir) return;
    std::ofstream out(wal(id, suffix), std::ios::binary | std::ios::app);
    out << text;
    out.flush();
  }

  // Creates and registers a session; nullptr when the id is taken.
  std::shared_ptr<Session> create(const SpecDocument& doc, const std::string& id) {
    auto spec = prepare_spec(doc, catalog);
    auto session = std::make_shared<Session>(spec, id, options.outDir);
    std::unique_lock lock(sessionsMutex);
    if (!sessions.emplace(id, session).second) return nullptr;
    return session;
  }

  void routes() {
    server.Get("/catalog/complete", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("prefix")) return send_error(res, 400, "missing 'prefix' parameter");
      send_json(res, 200, catalog.complete(req.get_param_value("prefix")));
    });

    server.Post("/spec/validate", [this](const httplib::Request& req, httplib::Response& res) {
      std::string why;
      auto doc = parse_document(req.body, why);
      if (!doc) return send_error(res, 400, why);
      send_json(res, 200, check_spec_document(*doc, catalog));
    });

    server.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
      std::string why;
      auto doc = parse_document(req.body, why);
      if (!doc) return send_error(res, 400, why);
      std::optional<std::uint64_t> seed;
      if (req.has_param("seed")) {
        try {
          seed = std::stoull(req.get_param_value("seed"));
        } catch (const std::exception&) {
          return send_error(res, 400, "'seed' must be a non-negative integer");
        }
      }
      auto findings = check_spec_document(*doc, catalog);
      if (!findings.empty()) {
        return send_json(res, 422, {{"error", "spec does not validate"}, {"findings", findings}});
      }
      std::string id = make_session_id(seed);
      std::shared_ptr<Session> session;
      try {
        session = create(*doc, id);
      } catch (const Error& e) {
        return send_error(res, 422, e.what());
      }
      if (!session) return send_error(res, 409, "session " + id + " already exists");
      if (options.walDir) {
        std::filesystem::create_directories(*options.walDir);
        std::ofstream out(wal(id, ".spec.json"), std::ios::binary);
        out << to_document(*doc).dump(2) << "\n";
      }
      send_json(res, 201, {{"sessionId", id}});
    });

    server.Post(R"(/session/([^/]+)/events)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  ingest(req.matches[1], req.body, res);
                });

    server.Post(R"(/session/([^/]+)/end)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
      auto session = find(req.matches[1]);
      if (!session) return send_error(res, 404, "unknown session");
      std::lock_guard lock(session->mutex);
      bool first = !session->runner.finished();
      SessionReport report;
      try {
        report = session->runner.finish();
      } catch (const Error& e) {
        return send_error(res, 500, e.what());
      }
      if (first) wal_append(session->runner.session_id(), ".end", "end\n");
      send_json(res, 200, report);
    });

    server.Get(R"(/session/([^/]+)/report)", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
      auto session = find(req.matches[1]);
      if (!session) return send_error(res, 404, "unknown session");
      std::lock_guard lock(session->mutex);
      const auto& report = session->runner.report();
      if (!report) return send_error(res, 409, "session has not ended");
      send_json(res, 200, *report);
    });

    server.Get(R"(/session/([^/]+)/snapshots/([^/]+))", [this](const httplib::Request& req,
                                                               httplib::Response& res) {
      auto session = find(req.matches[1]);
      if (!session) return send_error(res, 404, "unknown session");
      std::string name = req.matches[2];
      auto parsed = parse_snapshot_name(name);
      if (!parsed) return send_error(res, 404, "not a snapshot name");
      auto content = read_file(session->runner.snapshot_dir() / name);
      if (!content) return send_error(res, 404, "no such snapshot");
      res.status = 200;
      res.set_content(*content, parsed->extension == "svg" ? "image/svg+xml" : kJson);
    });
  }

  void ingest(const std::string& id, const std::string& body, httplib::Response& res) {
    auto session = find(id);
    if (!session) return send_error(res, 404, "unknown session");
    std::vector<SimEvent> events;
    try {
      events = parse_event_lines(body);
    } catch (const TrajectoryError& e) {
      return send_json(res, 400, {{"error", e.what()}, {"line", e.line()}, {"accepted", 0}});
    }

    std::lock_guard lock(session->mutex);
    auto& runner = session->runner;
    if (runner.finished() || runner.monitors().finalized()) {
      return send_error(res, 409, "session is finalized");
    }
    json alerts = json::array();
    json violations = json::array();
    std::string accepted;
    std::size_t count = 0;
    auto respond = [&](int status, const std::string& error) {
      wal_append(id, ".jsonl", accepted);
      json out = {{"accepted", count},
                  {"alerts", alerts},
                  {"violations", violations},
                  {"totalViolations", runner.monitors().violations().size()},
                  {"finalized", runner.monitors().finalized()}};
      if (!error.empty()) out["error"] = error;
      send_json(res, status, out);
    };
    for (const auto& e : events) {
      if (runner.monitors().finalized()) return respond(409, "event after sessionEnd");
      std::vector<MonitorOutput> outputs;
      try {
        outputs = runner.feed(e);
      } catch (const MonitorError& err) {
        return respond(422, err.what());
      } catch (const Error& err) {
        return respond(500, err.what());
      }
      accepted += event_line(e) + "\n";
      ++count;
      for (const auto& o : outputs) {
        if (const auto* a = std::get_if<ImmediateAlert>(&o)) alerts.push_back(*a);
        if (const auto* v = std::get_if<Violation>(&o)) violations.push_back(*v);
      }
    }
    respond(200, "");
  }

  std::size_t recover() {
    if (!options.walDir || !std::filesystem::exists(*options.walDir)) return 0;
    std::size_t restored = 0;
    for (const auto& entry : std::filesystem::directory_iterator(*options.walDir)) {
      std::string file = entry.path().filename().string();
      const std::string suffix = ".spec.json";
      if (file.size() <= suffix.size() || !file.ends_with(suffix)) continue;
      std::string id = file.substr(0, file.size() - suffix.size());
      if (find(id)) continue;
      auto specText = read_file(entry.path());
      std::string why;
      auto doc = specText ? parse_document(*specText, why) : std::nullopt;
      if (!doc) continue;
      std::shared_ptr<Session> session;
      try {
        session = create(*doc, id);
      } catch (const Error&) {
        continue;
      }
      if (!session) continue;
      std::lock_guard lock(session->mutex);
      // A damaged log restores the session up to its last good event.
      if (auto log = read_file(wal(id, ".jsonl"))) {
        std::istringstream lines(*log);
        std::string good;
        int number = 0;
        bool damaged = false;
        try {
          for (std::string line; std::getline(lines, line);) {
            ++number;
            if (line.empty()) continue;
            session->runner.feed(parse_event_line(line, number));
            good += line + "\n";
          }
        } catch (const Error&) {
          damaged = true;
        }
        // Drop the damaged tail so later appends start on a clean line.
        if (damaged) std::ofstream(wal(id, ".jsonl"), std::ios::binary | std::ios::trunc) << good;
      }
      if (std::filesystem::exists(wal(id, ".end"))) session->runner.finish();
      ++restored;
    }
    return restored;
  }
};

Service::Service(Catalog catalog, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(catalog), std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

std::size_t Service::recover() { return impl_->recover(); }

std::size_t Service::session_count() const {
  std::shared_lock lock(impl_->sessionsMutex);
  return impl_->sessions.size();
}

}  // namespace tips
