#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "tips/report.hpp"
#include "tips/serialize.hpp"

namespace tips {

std::string make_session_id(std::optional<std::uint64_t> seed) {
  std::mt19937_64 rng(seed ? *seed : std::random_device{}());
  std::uint64_t hi = rng();
  std::uint64_t lo = rng();
  // RFC 4122 version 4 / variant 1 bits.
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                static_cast<unsigned long long>(hi >> 32),
                static_cast<unsigned long long>((hi >> 16) & 0xFFFF),
                static_cast<unsigned long long>(hi & 0xFFFF),
                static_cast<unsigned long long>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

std::vector<std::string> missing_achievements(const ProcedureSpec& spec,
                                              const std::vector<Achievement>& achievements) {
  std::vector<std::string> missing;
  for (const auto& step : spec.steps) {
    bool done = false;
    for (const auto& a : achievements) done = done || a.stepIndex == step.index;
    if (!done) missing.push_back("step " + std::to_string(step.index));
  }
  bool completed = false;
  for (const auto& a : achievements) {
    completed = completed || (a.stepIndex == 0 && a.label.starts_with(kCompletionLabel));
  }
  if (!completed) missing.push_back("completion");
  return missing;
}

namespace {

std::string quantities(const std::vector<Quantity>& qs) {
  std::string out;
  for (const auto& q : qs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%g %s", out.empty() ? "" : ", ", q.value, q.unit.c_str());
    out += buf;
  }
  return out;
}

std::string message_text(const SessionReport& r, const std::vector<std::string>& missing) {
  std::ostringstream os;
  os << "TIPS session " << r.sessionId << ": " << r.violations.size() << " errors, "
     << r.achievements.size() << " achievements\n";
  os << "Procedure: " << r.specTitle << "\n";
  if (r.proficient) {
    os << "Result: proficient, no safety violations and every achievement recorded.\n";
  } else if (r.violations.empty()) {
    os << "Result: not yet proficient; no safety violations, but missing:";
    for (const auto& m : missing) os << " " << m << (&m == &missing.back() ? "" : ",");
    os << ".\n";
  } else {
    os << "Result: not yet proficient; " << r.violations.size()
       << " safety violation(s) to review with the instructor.\n";
  }
  os << "Snapshot directory: " << r.snapshotDir << "\n";
  if (!r.violations.empty()) {
    os << "\nErrors:\n";
    for (const auto& v : r.violations) {
      os << "  " << v.t << " ms  type " << to_roman(v.errorType) << "  " << quantities(v.measured)
         << "  (limit " << quantities(v.threshold) << ")\n";
      os << "    " << v.snapshotBaseName << ".svg\n";
      os << "    " << v.snapshotBaseName << ".json\n";
    }
  }
  if (!r.achievements.empty()) {
    os << "\nAchievements:\n";
    for (const auto& a : r.achievements) os << "  " << a.t << " ms  " << a.label << "\n";
  }
  return os.str();
}

}  // namespace

SessionReport build_report(const std::string& sessionId, const ProcedureSpec& spec,
                           const std::vector<Achievement>& achievements,
                           const std::vector<Violation>& violations,
                           const std::string& snapshotDir) {
  SessionReport r;
  r.sessionId = sessionId;
  r.specTitle = spec.title;
  r.achievements = achievements;
  r.violations = violations;
  r.snapshotDir = snapshotDir;
  auto missing = missing_achievements(spec, achievements);
  r.proficient = violations.empty() && missing.empty();
  r.messageText = message_text(r, missing);
  return r;
}

std::string report_json_text(const SessionReport& report) {
  nlohmann::json j = report;
  return j.dump(2) + "\n";
}

std::filesystem::path write_report(const SessionReport& report, const std::filesystem::path& dir) {
  auto session_dir = dir / report.sessionId;
  std::error_code ec;
  std::filesystem::create_directories(session_dir, ec);
  if (ec) throw Error("cannot create report directory " + session_dir.string() + ": " + ec.message());
  {
    std::ofstream out(session_dir / "report.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (session_dir / "report.json").string());
    out << report_json_text(report);
  }
  {
    std::ofstream out(session_dir / "message.txt", std::ios::binary);
    if (!out) throw Error("cannot write " + (session_dir / "message.txt").string());
    out << report.messageText;
  }
  return session_dir;
}

}  // namespace tips
