#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "tips/specparse.hpp"

namespace tips {

ParseError::ParseError(std::string field_, int column_, int token_,
                       std::vector<std::string> expected_, const std::string& message)
    : Error([&] {
        std::ostringstream os;
        os << field_ << ": ";
        if (column_ > 0) os << "column " << column_ << " (token " << token_ << "): ";
        os << message;
        return os.str();
      }()),
      field(std::move(field_)),
      column(column_),
      token(token_),
      expected(std::move(expected_)),
      detail(message) {}

double default_force_limit(const Simlet& s) {
  if (s.forceThreshold) return *s.forceThreshold;
  if (s.kind == SimletKind::Vessel || s.kind == SimletKind::Duct) {
    return SafetyDefaults::kVesselForceN;
  }
  return SafetyDefaults::kTissueForceN;
}

double default_stretch_limit(const Simlet& s) {
  return s.stretchThreshold.value_or(SafetyDefaults::kStretchRatio);
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

namespace {

enum class Tok { Word, Number, LParen, RParen, Semicolon, Comma, Colon, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;  // byte offset into the clause text
  int index = 0;           // 1-based
};

bool is_punct(char c) { return c == '(' || c == ')' || c == ';' || c == ',' || c == ':'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::size_t start, std::size_t end) {
    out.push_back({kind, std::string(text.substr(start, end - start)), start,
                   static_cast<int>(out.size()) + 1});
  };
  while (i < text.size()) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (is_punct(c)) {
      Tok kind = c == '(' ? Tok::LParen
                 : c == ')' ? Tok::RParen
                 : c == ';' ? Tok::Semicolon
                 : c == ',' ? Tok::Comma
                            : Tok::Colon;
      push(kind, i, i + 1);
      ++i;
    } else if (is_digit(c)) {
      std::size_t start = i;
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      push(Tok::Number, start, i);
    } else {
      std::size_t start = i;
      while (i < text.size() && !is_space(text[i]) && !is_punct(text[i])) ++i;
      push(Tok::Word, start, i);
    }
  }
  out.push_back({Tok::End, "", text.size(), static_cast<int>(out.size()) + 1});
  return out;
}

bool keyword_eq(std::string_view word, std::string_view keyword) {
  return case_fold(word) == keyword;
}

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string describe(const Token& t) { return t.kind == Tok::End ? "end of text" : squote(t.text); }

class SafetyParser {
 public:
  SafetyParser(std::string_view text, const Catalog& catalog, std::string_view toolId,
               std::string field)
      : text_(text), tokens_(lex(text)), catalog_(catalog), toolId_(toolId),
        field_(std::move(field)) {}

  std::vector<SafetyRule> parse() {
    std::vector<SafetyRule> rules;
    if (peek().kind == Tok::End) return rules;
    for (;;) {
      rules.push_back(clause());
      if (peek().kind == Tok::Semicolon) {
        advance();
        continue;
      }
      if (peek().kind == Tok::End) break;
      fail(peek(), {"';'", "end of text"}, "expected ';' or end of text, found " + describe(peek()));
    }
    return rules;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, std::vector<std::string> expected,
                         const std::string& message) const {
    throw ParseError(field_, static_cast<int>(at.offset) + 1, at.index, std::move(expected),
                     message);
  }

  void expect_word(std::string_view keyword) {
    const Token& t = peek();
    if (t.kind != Tok::Word || !keyword_eq(t.text, keyword)) {
      fail(t, {squote(keyword)}, "expected " + squote(keyword) + ", found " + describe(t));
    }
    advance();
  }

  void expect(Tok kind, std::string_view spelling) {
    const Token& t = peek();
    if (t.kind != kind) {
      fail(t, {squote(spelling)}, "expected " + squote(spelling) + ", found " + describe(t));
    }
    advance();
  }

  double positive_number() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail(t, {"number"}, "expected a number, found " + describe(t));
    double v = std::stod(t.text);
    if (!(v > 0.0)) fail(t, {"positive number"}, "non-positive number " + t.text);
    advance();
    return v;
  }

  int count() {
    const Token& t = peek();
    if (t.kind != Tok::Number || t.text.find('.') != std::string::npos) {
      fail(t, {"integer"}, "expected a clip count, found " + describe(t));
    }
    advance();
    return std::stoi(t.text);
  }

  // Collects NAME tokens up to (not including) a stop token.
  std::vector<Token> name_tokens(std::string_view stopWord = {}) {
    std::vector<Token> out;
    for (;;) {
      const Token& t = peek();
      bool word_or_number = t.kind == Tok::Word || t.kind == Tok::Number;
      if (!word_or_number) break;
      if (!stopWord.empty() && t.kind == Tok::Word && keyword_eq(t.text, stopWord)) break;
      out.push_back(advance());
    }
    if (out.empty()) {
      std::vector<std::string> expected{"name"};
      fail(peek(), expected, "expected a name, found " + describe(peek()));
    }
    return out;
  }

  // Removes a trailing two-word suffix such as "before cut" from a name.
  bool strip_suffix(std::vector<Token>& toks, std::string_view first, std::string_view second) {
    if (toks.size() < 3) return false;
    const Token& a = toks[toks.size() - 2];
    const Token& b = toks.back();
    if (a.kind == Tok::Word && b.kind == Tok::Word && keyword_eq(a.text, first) &&
        keyword_eq(b.text, second)) {
      toks.resize(toks.size() - 2);
      return true;
    }
    return false;
  }

  std::string span_text(const std::vector<Token>& toks) const {
    std::size_t start = toks.front().offset;
    std::size_t end = toks.back().offset + toks.back().text.size();
    return std::string(text_.substr(start, end - start));
  }

  const Simlet& anatomy(const std::vector<Token>& toks) const {
    std::string written = span_text(toks);
    NameResolution r = catalog_.resolve(written);
    const Token& at = toks.front();
    if (r.status == NameResolution::Status::Unknown) {
      fail(at, {"catalog name"}, "unresolved name " + squote(written));
    }
    if (r.status == NameResolution::Status::Ambiguous) {
      std::string list;
      for (const auto& c : r.candidates) list += (list.empty() ? "" : ", ") + c;
      fail(at, r.candidates, "ambiguous name " + squote(written) + " (candidates: " + list + ")");
    }
    if (r.kind != EntryKind::Simlet) {
      fail(at, {"anatomy name"}, squote(r.display) + " is a tool, not anatomy");
    }
    return *catalog_.find_simlet(r.id);
  }

  SafetyRule clause() {
    const Token& head = peek();
    if (head.kind != Tok::Word) {
      fail(head, kClauseStarts, "expected a safety clause, found " + describe(head));
    }
    std::string kw = case_fold(head.text);
    if (kw == "not") return proximity();
    if (kw == "max") return force();
    if (kw == "do") return stretch();
    if (kw == "clips") return clips();
    if (kw == "no") return foreign();
    if (kw == "free" || kw == "retrieve") return completion();
    if (kw == "suture") return suture();
    fail(head, kClauseStarts, "unknown safety clause starting with " + describe(head));
  }

  SafetyRule proximity() {
    expect_word("not");
    expect_word("too");
    expect_word("close");
    expect_word("to");
    const Simlet& target = anatomy(name_tokens());
    ProximityRule r{std::string(toolId_), target.id, SafetyDefaults::kProximityMm, true};
    if (peek().kind == Tok::LParen) {
      advance();
      r.minDistance = positive_number();
      expect_word("mm");
      expect(Tok::RParen, ")");
    }
    return r;
  }

  SafetyRule force() {
    expect_word("max");
    expect_word("force");
    double limit = positive_number();
    expect_word("n");
    expect_word("on");
    const Simlet& target = anatomy(name_tokens());
    return ForceLimitRule{target.id, limit, std::nullopt};
  }

  SafetyRule stretch() {
    expect_word("do");
    expect_word("not");
    expect_word("overstretch");
    const Simlet& target = anatomy(name_tokens());
    ForceLimitRule r{target.id, default_force_limit(target), default_stretch_limit(target)};
    if (peek().kind == Tok::LParen) {
      advance();
      r.maxStretch = positive_number();
      expect_word("x");
      if (peek().kind == Tok::Comma) {
        advance();
        r.maxForce = positive_number();
        expect_word("n");
      }
      expect(Tok::RParen, ")");
    }
    return r;
  }

  SafetyRule clips() {
    const Token& start = peek();
    expect_word("clips");
    expect(Tok::Colon, ":");
    int proximal = count();
    expect_word("proximal");
    expect(Tok::Comma, ",");
    int distal = count();
    expect_word("distal");
    expect_word("on");
    auto toks = name_tokens();
    bool before_cut = strip_suffix(toks, "before", "cut");
    const Simlet& target = anatomy(toks);
    if (proximal + distal < 1) fail(start, {"clip count"}, "clip rule requires at least one clip");
    if (!target.has(SimletFlag::Clippable)) {
      fail(toks.front(), {"clippable anatomy"}, squote(target.name) + " is not clippable");
    }
    return ClipLayoutRule{target.id, proximal, distal, before_cut};
  }

  SafetyRule foreign() {
    expect_word("no");
    expect_word("foreign");
    expect_word("objects");
    return NoForeignBodiesRule{};
  }

  SafetyRule completion() {
    bool freed = false;
    if (keyword_eq(peek().text, "free")) {
      advance();
      expect_word("and");
      freed = true;
    }
    expect_word("retrieve");
    auto toks = name_tokens();
    bool pouch = strip_suffix(toks, "via", "pouch");
    const Simlet& target = anatomy(toks);
    return CompletionRule{target.id, freed, pouch};
  }

  SafetyRule suture() {
    expect_word("suture");
    expect_word("only");
    expect_word("within");
    auto region = name_tokens("of");
    expect_word("of");
    auto toks = name_tokens();
    const Simlet& target = anatomy(toks);
    std::string regionId = span_text(region);
    bool declared = std::any_of(target.sutureRegions.begin(), target.sutureRegions.end(),
                                [&](const SutureRegionDef& d) { return d.regionId == regionId; });
    if (!declared) {
      fail(region.front(), {"suture region"},
           "unknown suture region " + squote(regionId) + " of " + squote(target.name));
    }
    return SutureRegionRule{target.id, regionId};
  }

  inline static const std::vector<std::string> kClauseStarts{
      "'not'", "'max'", "'do'", "'clips'", "'no'", "'free'", "'retrieve'", "'suture'"};

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Catalog& catalog_;
  std::string_view toolId_;
  std::string field_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<SafetyRule> parse_safety(std::string_view text, const Catalog& catalog,
                                     std::string_view toolId) {
  return SafetyParser(text, catalog, toolId, "safety").parse();
}

TaskStep parse_step(const StepFields& fields, const Catalog& catalog, int index) {
  TaskStep step;
  step.index = index;
  step.action = trim(fields.action);
  if (step.action.empty()) throw ParseError("action", 0, 0, {"action verb"}, "action must be nonempty");

  auto resolve = [&](const std::string& written, const char* field, EntryKind want) {
    std::string name = trim(written);
    NameResolution r = catalog.resolve(name);
    if (r.status == NameResolution::Status::Unknown) {
      throw ParseError(field, 0, 0, {"catalog name"}, "unknown name '" + name + "'");
    }
    if (r.status == NameResolution::Status::Ambiguous) {
      std::string list;
      for (const auto& c : r.candidates) list += (list.empty() ? "" : ", ") + c;
      throw ParseError(field, 0, 0, r.candidates,
                       "ambiguous name '" + name + "' (candidates: " + list + ")");
    }
    if (r.kind != want) {
      throw ParseError(field, 0, 0, {},
                       "'" + r.display + "' is " + (want == EntryKind::Tool ? "not a tool" : "not anatomy"));
    }
    return r.id;
  };
  step.anatomyId = resolve(fields.anatomy, "anatomy", EntryKind::Simlet);
  step.toolId = resolve(fields.tool, "tool", EntryKind::Tool);
  step.safetyText = fields.safety;
  step.safety = parse_safety(fields.safety, catalog, step.toolId);
  step.comment = fields.comment;
  return step;
}

std::string format_rule(const SafetyRule& rule, const Catalog& catalog) {
  struct Visitor {
    const Catalog& c;
    std::string operator()(const ProximityRule& r) const {
      return "not too close to " + c.display_name(r.protectedAnatomyId) + " (" +
             format_number(r.minDistance) + " mm)";
    }
    std::string operator()(const ForceLimitRule& r) const {
      if (r.maxStretch) {
        return "do not overstretch " + c.display_name(r.anatomyId) + " (" +
               format_number(*r.maxStretch) + "x, " + format_number(r.maxForce) + " N)";
      }
      return "max force " + format_number(r.maxForce) + " N on " + c.display_name(r.anatomyId);
    }
    std::string operator()(const NoForeignBodiesRule&) const { return "no foreign objects"; }
    std::string operator()(const ClipLayoutRule& r) const {
      return "clips: " + std::to_string(r.requiredProximal) + " proximal, " +
             std::to_string(r.requiredDistal) + " distal on " + c.display_name(r.vesselId) +
             (r.mustPrecedeCut ? " before cut" : "");
    }
    std::string operator()(const CompletionRule& r) const {
      return std::string(r.mustBeFreed ? "free and retrieve " : "retrieve ") +
             c.display_name(r.targetAnatomyId) + (r.mustBeRetrievedViaPouch ? " via pouch" : "");
    }
    std::string operator()(const SutureRegionRule& r) const {
      return "suture only within " + r.regionId + " of " + c.display_name(r.anatomyId);
    }
  };
  return std::visit(Visitor{catalog}, rule);
}

std::string format_safety(const std::vector<SafetyRule>& rules, const Catalog& catalog) {
  std::string out;
  for (const auto& r : rules) {
    if (!out.empty()) out += "; ";
    out += format_rule(r, catalog);
  }
  return out;
}

StepFields format_step(const TaskStep& step, const Catalog& catalog) {
  return {step.action, catalog.display_name(step.anatomyId), catalog.display_name(step.toolId),
          format_safety(step.safety, catalog), step.comment};
}

bool same_step(const TaskStep& a, const TaskStep& b) {
  return a.index == b.index && a.action == b.action && a.anatomyId == b.anatomyId &&
         a.toolId == b.toolId && a.safety == b.safety && a.comment == b.comment;
}

}  // namespace tips
