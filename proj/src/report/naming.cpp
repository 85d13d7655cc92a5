#include <cmath>
#include <cstdio>
#include <set>

#include "tips/report.hpp"

namespace tips {

namespace {

const std::set<std::string, std::less<>>& count_units() {
  static const std::set<std::string, std::less<>> units{"clip", "prox", "dist", "ach", "wrong"};
  return units;
}

std::string number_token(double value, bool integral) {
  if (!std::isfinite(value) || value < 0.0) value = 0.0;
  char buf[64];
  if (integral) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(value)));
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.3f", value);
  std::string s = buf;
  // Trim to at least one decimal.
  while (s.size() > 2 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::optional<Quantity> parse_quantity(std::string_view s) {
  std::size_t i = 0;
  std::string number;
  while (i < s.size() && is_digit(s[i])) number += s[i++];
  if (number.empty()) return std::nullopt;
  if (i + 1 < s.size() && s[i] == 'p' && is_digit(s[i + 1])) {
    number += '.';
    ++i;
    while (i < s.size() && is_digit(s[i])) number += s[i++];
  }
  std::string unit(s.substr(i));
  if (unit.empty()) return std::nullopt;
  for (char c : unit) {
    if (!is_alpha(c)) return std::nullopt;
  }
  return Quantity{std::stod(number), unit};
}

}  // namespace

std::string value_token(const std::vector<Quantity>& values) {
  std::string out;
  for (const auto& q : values) {
    if (!out.empty()) out += '-';
    out += number_token(q.value, count_units().count(q.unit) != 0) + q.unit;
  }
  return out.empty() ? "0none" : out;
}

std::string snapshot_base_name(TimeMs t, ErrorType type, const std::vector<Quantity>& values) {
  char stamp[32];
  std::snprintf(stamp, sizeof stamp, "%08lld", static_cast<long long>(t));
  return std::string(stamp) + "ms_type" + std::string(to_roman(type)) + "_" + value_token(values);
}

const std::regex& snapshot_name_regex() {
  static const std::regex re(R"(^\d{8}ms_type(I|II|III|IV|V|VI)_[A-Za-z0-9p\-]+\.(json|svg)$)");
  return re;
}

std::optional<SnapshotName> parse_snapshot_name(std::string_view file_name) {
  std::string name(file_name);
  if (!std::regex_match(name, snapshot_name_regex())) return std::nullopt;
  SnapshotName out;
  out.t = std::stoll(name.substr(0, 8));
  auto type_start = name.find("ms_type") + 7;
  auto underscore = name.find('_', type_start);
  auto type = error_type_from_roman(std::string_view(name).substr(type_start, underscore - type_start));
  if (!type) return std::nullopt;
  out.type = *type;
  auto dot = name.rfind('.');
  out.extension = name.substr(dot + 1);
  std::string_view values = std::string_view(name).substr(underscore + 1, dot - underscore - 1);
  while (!values.empty()) {
    auto dash = values.find('-');
    auto q = parse_quantity(values.substr(0, dash));
    if (!q) return std::nullopt;
    out.values.push_back(*q);
    if (dash == std::string_view::npos) break;
    values.remove_prefix(dash + 1);
  }
  return out;
}

}  // namespace tips
