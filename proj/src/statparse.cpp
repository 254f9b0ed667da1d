#include "reprofeat/statparse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

namespace reprofeat {

const char *to_string(StatKind k) {
  switch (k) {
  case StatKind::bare_p: return "bare_p";
  case StatKind::t_test: return "t_test";
  case StatKind::f_test: return "f_test";
  case StatKind::chi2: return "chi2";
  case StatKind::r_corr: return "r_corr";
  case StatKind::z_test: return "z_test";
  }
  return "?";
}

const char *to_string(POperator op) {
  switch (op) {
  case POperator::lt: return "lt";
  case POperator::eq: return "eq";
  case POperator::gt: return "gt";
  }
  return "?";
}

const char *to_string(SampleSizeSource s) {
  switch (s) {
  case SampleSizeSource::free_text_N: return "free_text_N";
  case SampleSizeSource::chi2_arg: return "chi2_arg";
  case SampleSizeSource::derived_from_df: return "derived_from_df";
  }
  return "?";
}

namespace {

constexpr std::string_view kMinus = "\xE2\x88\x92";     // U+2212
constexpr std::string_view kLe = "\xE2\x89\xA4";        // ≤
constexpr std::string_view kGe = "\xE2\x89\xA5";        // ≥
constexpr std::string_view kTimes = "\xC3\x97";         // ×
constexpr std::string_view kMidDot = "\xC2\xB7";        // ·
constexpr std::string_view kSup2 = "\xC2\xB2";          // ²
constexpr std::string_view kChiSmall = "\xCF\x87";      // χ
constexpr std::string_view kChiCapital = "\xCE\xA7";    // Χ

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_alnum(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c == '_';
}

struct Number {
  double value;
  std::size_t end;
};

struct PClause {
  enum class Status { ok, missing_operator, out_of_range } status;
  POperator op = POperator::eq;
  double p = 0.0;
  std::size_t end = 0;
};

/// Byte-level cursor helpers over the source text.
class Scanner {
public:
  explicit Scanner(std::string_view text) : s_(text) {}

  std::size_t size() const { return s_.size(); }
  char at(std::size_t i) const { return i < s_.size() ? s_[i] : '\0'; }

  bool starts_with(std::size_t i, std::string_view lit) const {
    return i <= s_.size() && s_.substr(i).starts_with(lit);
  }

  // True when position i does not continue a word to its left.
  bool word_start(std::size_t i) const {
    if (i == 0)
      return true;
    const auto prev = static_cast<unsigned char>(s_[i - 1]);
    if (prev < 0x80)
      return !is_ascii_alnum(static_cast<char>(prev));
    std::size_t j = i - 1;
    while (j > 0 && (static_cast<unsigned char>(s_[j]) & 0xC0) == 0x80)
      --j;
    const char32_t cp = decode(j);
    const bool letter = (cp >= 0xC0 && cp <= 0x24F) ||
                        (cp >= 0x370 && cp <= 0x3FF) ||
                        (cp >= 0x400 && cp <= 0x4FF);
    return !letter;
  }

  // True when position i does not continue a word to its right.
  bool word_end(std::size_t i) const {
    return i >= s_.size() || !is_ascii_alnum(s_[i]);
  }

  std::size_t skip_ws(std::size_t i) const {
    for (;;) {
      if (i < s_.size() &&
          (s_[i] == ' ' || s_[i] == '\t' || s_[i] == '\n' || s_[i] == '\r')) {
        ++i;
      } else if (starts_with(i, "\xC2\xA0")) { // no-break space
        i += 2;
      } else if (starts_with(i, "\xE2\x80\x89") ||
                 starts_with(i, "\xE2\x80\xAF") ||
                 starts_with(i, "\xE2\x80\x8A")) { // thin / narrow spaces
        i += 3;
      } else {
        return i;
      }
    }
  }

  std::optional<std::pair<POperator, std::size_t>> op(std::size_t i) const {
    if (starts_with(i, "<=") || starts_with(i, "=<"))
      return std::pair{POperator::lt, i + 2};
    if (starts_with(i, ">=") || starts_with(i, "=>"))
      return std::pair{POperator::gt, i + 2};
    if (starts_with(i, kLe))
      return std::pair{POperator::lt, i + kLe.size()};
    if (starts_with(i, kGe))
      return std::pair{POperator::gt, i + kGe.size()};
    switch (at(i)) {
    case '<': return std::pair{POperator::lt, i + 1};
    case '>': return std::pair{POperator::gt, i + 1};
    case '=': return std::pair{POperator::eq, starts_with(i, "==") ? i + 2 : i + 1};
    default: return std::nullopt;
    }
  }

  // Signed decimal / exponential number. With comma_decimal, "2,3" reads as
  // 2.3 and "1,024.5" as 1024.5.
  std::optional<Number> number(std::size_t i, bool comma_decimal) const {
    std::string buf;
    if (at(i) == '+') {
      ++i;
    } else if (at(i) == '-') {
      buf += '-';
      ++i;
    } else if (starts_with(i, kMinus)) {
      buf += '-';
      i += kMinus.size();
    }
    const std::size_t int_begin = i;
    while (is_digit(at(i)))
      buf += s_[i++];
    bool have_digits = i > int_begin;
    if (comma_decimal && have_digits && at(i) == ',' && is_digit(at(i + 1))) {
      std::size_t j = i + 1;
      std::string frac;
      while (is_digit(at(j)))
        frac += s_[j++];
      if (at(j) == '.' && is_digit(at(j + 1))) {
        buf += frac; // thousands separator
      } else {
        buf += '.';
        buf += frac;
      }
      i = j;
    }
    if (at(i) == '.' && is_digit(at(i + 1)) &&
        buf.find('.') == std::string::npos) {
      if (!have_digits)
        buf += '0';
      buf += s_[i++];
      while (is_digit(at(i)))
        buf += s_[i++];
      have_digits = true;
    }
    if (!have_digits)
      return std::nullopt;

    bool has_exp = false;
    if (at(i) == 'e' || at(i) == 'E') {
      std::size_t j = i + 1;
      std::string exp = "e";
      if (at(j) == '+' || at(j) == '-') {
        exp += s_[j] == '-' ? "-" : "";
        ++j;
      } else if (starts_with(j, kMinus)) {
        exp += '-';
        j += kMinus.size();
      }
      if (is_digit(at(j))) {
        while (is_digit(at(j)))
          exp += s_[j++];
        buf += exp;
        i = j;
        has_exp = true;
      }
    }

    double value = 0.0;
    auto res = std::from_chars(buf.data(), buf.data() + buf.size(), value);
    if (res.ec != std::errc() || res.ptr != buf.data() + buf.size())
      return std::nullopt;

    if (!has_exp) {
      if (auto scaled = times_ten(i)) {
        value *= std::pow(10.0, scaled->first);
        i = scaled->second;
      }
    }
    return Number{value, i};
  }

  // Parses "× 10^-4" (also x, *, ·; caret optional when a sign is present).
  std::optional<std::pair<int, std::size_t>> times_ten(std::size_t i) const {
    std::size_t j = skip_ws(i);
    if (starts_with(j, kTimes))
      j += kTimes.size();
    else if (starts_with(j, kMidDot))
      j += kMidDot.size();
    else if (at(j) == 'x' || at(j) == '*')
      ++j;
    else
      return std::nullopt;
    j = skip_ws(j);
    if (!starts_with(j, "10"))
      return std::nullopt;
    j += 2;
    bool caret = false;
    if (at(j) == '^') {
      caret = true;
      ++j;
    }
    bool negative = false, signed_ = false;
    if (at(j) == '-') {
      negative = signed_ = true;
      ++j;
    } else if (starts_with(j, kMinus)) {
      negative = signed_ = true;
      j += kMinus.size();
    } else if (at(j) == '+') {
      signed_ = true;
      ++j;
    }
    if (!caret && !signed_)
      return std::nullopt;
    if (!is_digit(at(j)))
      return std::nullopt;
    int e = 0;
    while (is_digit(at(j)) && e < 1000)
      e = e * 10 + (s_[j++] - '0');
    return std::pair{negative ? -e : e, j};
  }

  // p-value clause: "p <op> number", also "p-value" / "p value".
  std::optional<PClause> p_clause(std::size_t i) const {
    if (!(at(i) == 'p' || at(i) == 'P') || !word_start(i))
      return std::nullopt;
    std::size_t j = i + 1;
    for (std::string_view suffix : {"-values", "-value", " values", " value"}) {
      if (starts_with(j, suffix)) {
        j += suffix.size();
        break;
      }
    }
    if (!word_end(j)) {
      // "p0.01": operator lost with no space; "p53" and the like stay text.
      if (j == i + 1) {
        if (auto n = number(j, false);
            n && word_end(n->end) && n->value >= 0.0 && n->value <= 1.0)
          return PClause{PClause::Status::missing_operator, POperator::eq,
                         n->value, n->end};
      }
      return std::nullopt;
    }
    j = skip_ws(j);
    auto o = op(j);
    if (!o) {
      if (auto n = number(j, false); n && word_end(n->end))
        return PClause{PClause::Status::missing_operator, POperator::eq,
                       n->value, n->end};
      return std::nullopt;
    }
    auto n = number(skip_ws(o->second), false);
    if (!n)
      return std::nullopt;
    PClause pc{PClause::Status::ok, o->first, n->value, n->end};
    if (!(n->value >= 0.0 && n->value <= 1.0))
      pc.status = PClause::Status::out_of_range;
    return pc;
  }

  // Separator between a statistic and its p clause: ", " "; " or " (".
  std::size_t separator(std::size_t i) const {
    i = skip_ws(i);
    if (at(i) == ',' || at(i) == ';' || at(i) == '(')
      ++i;
    return skip_ws(i);
  }

  // Head of a chi-square expression; returns the position after "2".
  std::optional<std::size_t> chi_head(std::size_t i) const {
    for (std::string_view word : {"chi", "Chi", "CHI"}) {
      if (!starts_with(i, word))
        continue;
      std::size_t j = i + word.size();
      for (std::string_view tail :
           {"-squared", "-square", " squared", " square", "squared", "square",
            "^2", "2", "\xC2\xB2"}) {
        if (starts_with(j, tail))
          return j + tail.size();
      }
      return std::nullopt;
    }
    std::size_t j = i;
    bool greek = false;
    if (starts_with(j, kChiSmall) || starts_with(j, kChiCapital)) {
      j += 2;
      greek = true;
    } else if (starts_with(j, kTimes)) {
      j += kTimes.size();
    } else if (at(j) == 'X' || at(j) == 'x') {
      j += 1;
    } else {
      return std::nullopt;
    }
    if (greek)
      j = skip_ws(j);
    if (at(j) == '^')
      ++j;
    if (at(j) == '2')
      return j + 1;
    if (starts_with(j, kSup2))
      return j + kSup2.size();
    return std::nullopt;
  }

  char32_t decode(std::size_t i) const {
    const auto b0 = static_cast<unsigned char>(s_[i]);
    auto cont = [&](std::size_t k) {
      return k < s_.size() ? static_cast<unsigned char>(s_[k]) & 0x3F : 0;
    };
    if (b0 < 0x80)
      return b0;
    if ((b0 & 0xE0) == 0xC0)
      return ((b0 & 0x1F) << 6) | cont(i + 1);
    if ((b0 & 0xF0) == 0xE0)
      return ((b0 & 0x0F) << 12) | (cont(i + 1) << 6) | cont(i + 2);
    return ((b0 & 0x07) << 18) | (cont(i + 1) << 12) | (cont(i + 2) << 6) |
           cont(i + 3);
  }

private:
  std::string_view s_;
};

struct Args {
  std::vector<double> values;
  std::optional<int> explicit_n;
  std::size_t end;
};

// "( a [, b ...] )" with optional "N = n" element when allow_n.
std::optional<Args> parse_args(const Scanner &sc, std::size_t i, bool allow_n) {
  i = sc.skip_ws(i);
  if (sc.at(i) != '(')
    return std::nullopt;
  Args args;
  i = sc.skip_ws(i + 1);
  for (;;) {
    if (allow_n && (sc.at(i) == 'N' || sc.at(i) == 'n')) {
      std::size_t j = sc.skip_ws(i + 1);
      if (sc.at(j) != '=')
        return std::nullopt;
      auto n = sc.number(sc.skip_ws(j + 1), false);
      if (!n || n->value < 1 || n->value != std::floor(n->value) ||
          args.explicit_n)
        return std::nullopt;
      args.explicit_n = static_cast<int>(n->value);
      i = n->end;
    } else {
      auto n = sc.number(i, false);
      if (!n)
        return std::nullopt;
      args.values.push_back(n->value);
      i = n->end;
    }
    i = sc.skip_ws(i);
    if (sc.at(i) == ')') {
      args.end = i + 1;
      return args;
    }
    if (sc.at(i) != ',')
      return std::nullopt;
    i = sc.skip_ws(i + 1);
  }
}

enum class Outcome { none, mention, rejected };

struct ParseResult {
  Outcome outcome = Outcome::none;
  StatMention mention;
  StatDiagnostic diagnostic;
  std::size_t end = 0;
};

ParseResult reject(std::size_t start, std::size_t end, std::string reason) {
  ParseResult r;
  r.outcome = Outcome::rejected;
  r.diagnostic = {{start, end}, std::move(reason)};
  r.end = end;
  return r;
}

// Completes a test-statistic expression after the head (and its arguments)
// ending at `i`.
ParseResult finish_statistic(const Scanner &sc, std::size_t start,
                             std::size_t i, StatMention m) {
  i = sc.skip_ws(i);
  auto o = sc.op(i);
  if (!o) {
    // Head followed by a value without its comparison operator.
    auto v = sc.number(i, true);
    if (!v)
      return {};
    std::size_t end = v->end;
    if (auto pc = sc.p_clause(sc.separator(end)))
      end = pc->end;
    else if (m.kind == StatKind::z_test)
      return {}; // a lone "z 1.2" is not evidence of an expression
    return reject(start, end, "missing operator after test statistic");
  }
  auto v = sc.number(sc.skip_ws(o->second), true);
  if (!v)
    return {};
  m.stat_value = v->value;
  auto pc = sc.p_clause(sc.separator(v->end));
  if (!pc)
    return {};
  switch (pc->status) {
  case PClause::Status::missing_operator:
    return reject(start, pc->end, "missing operator before p-value");
  case PClause::Status::out_of_range:
    return reject(start, pc->end, "p-value outside [0, 1]");
  case PClause::Status::ok:
    break;
  }
  m.p_operator = pc->op;
  m.p_value = pc->p;
  m.span = {start, pc->end};
  ParseResult r;
  r.outcome = Outcome::mention;
  r.mention = std::move(m);
  r.end = pc->end;
  return r;
}

ParseResult parse_statistic(const Scanner &sc, std::size_t i) {
  if (!sc.word_start(i))
    return {};
  StatMention m;
  const char c = sc.at(i);

  if (auto chi_end = sc.chi_head(i)) {
    auto args = parse_args(sc, *chi_end, true);
    if (!args || args->values.empty() || args->values.size() > 2 ||
        (args->explicit_n && args->values.size() != 1))
      return {};
    m.kind = StatKind::chi2;
    m.params = args->values;
    m.explicit_n = args->explicit_n;
    return finish_statistic(sc, i, args->end, std::move(m));
  }
  if ((c == 't' || c == 'T') && sc.word_end(i + 1)) {
    auto args = parse_args(sc, i + 1, false);
    if (!args || args->values.size() != 1)
      return {};
    m.kind = StatKind::t_test;
    m.params = args->values;
    return finish_statistic(sc, i, args->end, std::move(m));
  }
  if ((c == 'F' || c == 'f') && sc.word_end(i + 1)) {
    auto args = parse_args(sc, i + 1, false);
    if (!args || args->values.size() != 2)
      return {};
    m.kind = StatKind::f_test;
    m.params = args->values;
    return finish_statistic(sc, i, args->end, std::move(m));
  }
  if (c == 'r' && sc.word_end(i + 1)) {
    m.kind = StatKind::r_corr;
    std::size_t after = i + 1;
    if (auto args = parse_args(sc, i + 1, false)) {
      if (args->values.size() != 1)
        return {};
      m.params = args->values;
      after = args->end;
    }
    return finish_statistic(sc, i, after, std::move(m));
  }
  if ((c == 'z' || c == 'Z') && sc.word_end(i + 1)) {
    m.kind = StatKind::z_test;
    return finish_statistic(sc, i, i + 1, std::move(m));
  }
  return {};
}

ParseResult parse_bare_p(const Scanner &sc, std::size_t i) {
  auto pc = sc.p_clause(i);
  if (!pc)
    return {};
  switch (pc->status) {
  case PClause::Status::missing_operator:
    return reject(i, pc->end, "missing operator before p-value");
  case PClause::Status::out_of_range:
    return reject(i, pc->end, "p-value outside [0, 1]");
  case PClause::Status::ok:
    break;
  }
  ParseResult r;
  r.outcome = Outcome::mention;
  r.mention.kind = StatKind::bare_p;
  r.mention.p_operator = pc->op;
  r.mention.p_value = pc->p;
  r.mention.span = {i, pc->end};
  r.end = pc->end;
  return r;
}

} // namespace

StatExtraction extract_stat_mentions_with_diagnostics(std::string_view text) {
  StatExtraction out;
  Scanner sc(text);
  std::size_t i = 0;
  while (i < sc.size()) {
    ParseResult r = parse_statistic(sc, i);
    if (r.outcome == Outcome::none)
      r = parse_bare_p(sc, i);
    switch (r.outcome) {
    case Outcome::mention:
      out.mentions.push_back(std::move(r.mention));
      i = r.end;
      break;
    case Outcome::rejected:
      out.diagnostics.push_back(std::move(r.diagnostic));
      i = r.end;
      break;
    case Outcome::none:
      ++i;
      break;
    }
  }
  return out;
}

std::vector<StatMention> extract_stat_mentions(std::string_view text) {
  return extract_stat_mentions_with_diagnostics(text).mentions;
}

std::vector<SampleSizeMention>
derive_sample_sizes(std::string_view text,
                    const std::vector<StatMention> &mentions) {
  std::vector<SampleSizeMention> out;
  Scanner sc(text);

  auto inside_chi2 = [&](std::size_t pos) {
    return std::any_of(mentions.begin(), mentions.end(), [&](const auto &m) {
      return m.kind == StatKind::chi2 && pos >= m.span.start &&
             pos < m.span.end;
    });
  };

  for (std::size_t i = 0; i < sc.size(); ++i) {
    const char c = sc.at(i);
    if ((c != 'N' && c != 'n') || !sc.word_start(i) || !sc.word_end(i + 1))
      continue;
    std::size_t j = sc.skip_ws(i + 1);
    if (sc.at(j) != '=')
      continue;
    j = sc.skip_ws(j + 1);
    if (!is_digit(sc.at(j)))
      continue;
    long long v = 0;
    std::size_t k = j;
    while (is_digit(sc.at(k)) && v < 100000000)
      v = v * 10 + (text[k++] - '0');
    // "1,024": a comma followed by exactly three digits groups thousands.
    while (sc.at(k) == ',' && is_digit(sc.at(k + 1)) && is_digit(sc.at(k + 2)) &&
           is_digit(sc.at(k + 3)) && !is_digit(sc.at(k + 4)) &&
           v < 100000000) {
      v = v * 1000 + (text[k + 1] - '0') * 100 + (text[k + 2] - '0') * 10 +
          (text[k + 3] - '0');
      k += 4;
    }
    if (sc.at(k) == '.' && is_digit(sc.at(k + 1)))
      continue; // not an integer count
    if (v < 1 || v > std::numeric_limits<int>::max() || inside_chi2(i))
      continue;
    out.push_back({static_cast<int>(v), SampleSizeSource::free_text_N, {i, k}});
    i = k - 1;
  }

  for (const auto &m : mentions) {
    if (m.kind == StatKind::chi2) {
      if (m.explicit_n)
        out.push_back({*m.explicit_n, SampleSizeSource::free_text_N, m.span});
      else if (m.params.size() >= 2 && m.params[1] >= 1 &&
               m.params[1] == std::floor(m.params[1]))
        out.push_back({static_cast<int>(m.params[1]),
                       SampleSizeSource::chi2_arg, m.span});
    } else if (m.kind == StatKind::t_test && m.params.size() == 1 &&
               m.params[0] >= 0 && m.params[0] == std::floor(m.params[0])) {
      out.push_back({static_cast<int>(m.params[0]) + 1,
                     SampleSizeSource::derived_from_df, m.span});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.span < b.span;
  });
  std::set<std::tuple<int, std::size_t, std::size_t>> seen;
  std::erase_if(out, [&](const SampleSizeMention &s) {
    return !seen.insert({s.value, s.span.start, s.span.end}).second;
  });
  return out;
}

StatFeatures derive_statistical_features(
    const std::vector<StatMention> &mentions,
    const std::vector<SampleSizeMention> &sample_sizes,
    SampleSizeAggregation aggregation) {
  StatFeatures f;
  if (!mentions.empty()) {
    std::vector<const StatMention *> ordered;
    for (const auto &m : mentions)
      ordered.push_back(&m);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](auto *a, auto *b) { return a->span < b->span; });

    const StatMention *min_m = ordered.front();
    double max_p = min_m->p_value;
    for (const auto *m : ordered) {
      if (m->p_value < min_m->p_value)
        min_m = m;
      max_p = std::max(max_p, m->p_value);
      if (m->has_test_statistic())
        ++f.num_hypo_tested;
      // An upper-bounded report ("p > .05") does not establish significance.
      if (m->p_value <= kSignificanceLevel && m->p_operator != POperator::gt)
        ++f.num_significant;
    }
    f.real_p = min_m->p_value;
    f.real_p_sign = min_m->p_operator == POperator::lt   ? -1
                    : min_m->p_operator == POperator::eq ? 0
                                                         : 1;
    f.p_val_range = max_p - min_m->p_value;
    f.extend_p = f.num_hypo_tested > 0;
    f.is_default.real_p = f.is_default.real_p_sign = false;
    f.is_default.p_val_range = f.is_default.num_hypo_tested = false;
    f.is_default.extend_p = f.is_default.num_significant = false;
  }
  if (!sample_sizes.empty()) {
    long long agg = 0;
    switch (aggregation) {
    case SampleSizeAggregation::max:
      for (const auto &s : sample_sizes)
        agg = std::max<long long>(agg, s.value);
      break;
    case SampleSizeAggregation::min:
      agg = std::numeric_limits<int>::max();
      for (const auto &s : sample_sizes)
        agg = std::min<long long>(agg, s.value);
      break;
    case SampleSizeAggregation::sum:
      for (const auto &s : sample_sizes)
        agg += s.value;
      agg = std::min<long long>(agg, std::numeric_limits<int>::max());
      break;
    }
    f.sample_size = static_cast<int>(agg);
    f.is_default.sample_size = false;
  }
  return f;
}

std::string diagnostics_to_json(std::string_view paper_id,
                                const std::vector<StatDiagnostic> &diags) {
  nlohmann::json j;
  j["paper"] = std::string(paper_id);
  j["rejected"] = diags.size();
  j["candidates"] = nlohmann::json::array();
  for (const auto &d : diags)
    j["candidates"].push_back(
        {{"start", d.span.start}, {"end", d.span.end}, {"reason", d.reason}});
  return j.dump();
}

} // namespace reprofeat
