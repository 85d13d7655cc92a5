#include <fstream>
#include <sstream>

#include "tips/harness.hpp"
#include "tips/serialize.hpp"

namespace tips {

using nlohmann::json;

namespace {

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

template <typename F>
void for_each_line(std::string_view text, int firstLine, F&& f) {
  int number = firstLine;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(line, number++);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

SimEvent parse_event_line(std::string_view line, int lineNumber) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw TrajectoryError(lineNumber, std::string("not valid JSON (") + e.what() + ")");
  }
  try {
    return j.get<SimEvent>();
  } catch (const FormatError& e) {
    throw TrajectoryError(lineNumber, e.what());
  } catch (const json::exception& e) {
    throw TrajectoryError(lineNumber, e.what());
  }
}

std::vector<SimEvent> parse_event_lines(std::string_view text, int firstLine) {
  std::vector<SimEvent> events;
  for_each_line(text, firstLine, [&](std::string_view line, int number) {
    if (!blank(line)) events.push_back(parse_event_line(line, number));
  });
  return events;
}

std::string event_line(const SimEvent& e) { return json(e).dump(); }

Trajectory parse_trajectory(std::string_view text) {
  Trajectory t;
  bool haveHeader = false;
  int lastLine = 0;
  for_each_line(text, 1, [&](std::string_view line, int number) {
    if (blank(line)) return;
    lastLine = number;
    if (!haveHeader) {
      json h;
      try {
        h = json::parse(line);
      } catch (const json::exception& e) {
        throw TrajectoryError(number, std::string("header is not valid JSON (") + e.what() + ")");
      }
      if (!h.is_object() || !h.contains("specRef") || !h["specRef"].is_string()) {
        throw TrajectoryError(number, "header must be an object with a string 'specRef'");
      }
      t.header.specRef = h["specRef"].get<std::string>();
      if (h.contains("catalogRef")) {
        if (!h["catalogRef"].is_string()) throw TrajectoryError(number, "'catalogRef' must be a string");
        t.header.catalogRef = h["catalogRef"].get<std::string>();
      }
      if (h.contains("sessionSeed")) {
        if (!h["sessionSeed"].is_number_unsigned()) {
          throw TrajectoryError(number, "'sessionSeed' must be a non-negative integer");
        }
        t.header.sessionSeed = h["sessionSeed"].get<std::uint64_t>();
      }
      haveHeader = true;
      return;
    }
    SimEvent e = parse_event_line(line, number);
    if (!t.events.empty() && e.t < t.events.back().t) {
      throw TrajectoryError(number, "timestamp " + std::to_string(e.t) + " ms is earlier than " +
                                        std::to_string(t.events.back().t) + " ms");
    }
    if (!t.events.empty() && std::holds_alternative<SessionEnd>(t.events.back().body)) {
      throw TrajectoryError(number, "event after sessionEnd");
    }
    t.events.push_back(std::move(e));
  });
  if (!haveHeader) throw TrajectoryError(1, "missing header line");
  if (t.events.empty() || !std::holds_alternative<SessionEnd>(t.events.back().body)) {
    throw TrajectoryError(lastLine, "trajectory must end with a sessionEnd event");
  }
  return t;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open trajectory " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trajectory(ss.str());
}

std::string trajectory_text(const Trajectory& t) {
  json h = {{"specRef", t.header.specRef},
            {"catalogRef", t.header.catalogRef},
            {"sessionSeed", t.header.sessionSeed}};
  std::string out = h.dump() + "\n";
  for (const auto& e : t.events) out += event_line(e) + "\n";
  return out;
}

void write_trajectory(const Trajectory& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << trajectory_text(t);
}

}  // namespace tips
