#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reprofeat {

enum class StatKind { bare_p, t_test, f_test, chi2, r_corr, z_test };
enum class POperator { lt, eq, gt };

const char *to_string(StatKind k);
const char *to_string(POperator op);

/// Half-open byte range [start, end) into the source text.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const CharSpan &) const = default;
  auto operator<=>(const CharSpan &) const = default;
};

/// One reported p-value, optionally bundled with its test statistic.
///
/// Parameter counts follow the test: t and r carry one degree-of-freedom
/// argument, F carries two, chi-square carries its df and, when the sample
/// size was written without "N =", that bare number as a second argument.
/// A bare p or a z statistic carries none.
struct StatMention {
  StatKind kind = StatKind::bare_p;
  std::vector<double> params;
  std::optional<double> stat_value;
  POperator p_operator = POperator::eq;
  double p_value = 0.0;
  std::optional<int> explicit_n;
  CharSpan span;

  bool has_test_statistic() const { return kind != StatKind::bare_p; }
  bool operator==(const StatMention &) const = default;
};

/// A candidate expression that looked like a p-value report but was rejected.
struct StatDiagnostic {
  CharSpan span;
  std::string reason;
};

struct StatExtraction {
  std::vector<StatMention> mentions;
  std::vector<StatDiagnostic> diagnostics;
};

/// Scans plain text for p-value expressions. Recognised forms:
///
///   p <op> <sign><number>                      bare p
///   t(df) <op> v, p <op> x                     Student t
///   F(df1, df2) <op> v, p <op> x               F test
///   chi2(df[, N = n | , n]) <op> v, p <op> x   chi-square (also χ2, χ², X2,
///                                              ×2, chi-square)
///   r(df) <op> v, p <op> x                     correlation
///   z <op> v, p <op> x                         z test
///
/// <op> is one of = < > <= >= ≤ ≥ (the inclusive forms fold into lt/gt).
/// Numbers accept a leading sign (including U+2212), ".001" without a
/// leading zero, exponents ("1.2e-4") and "1.2 × 10^-4". Inside a test
/// statistic value "2,3" reads as 2.3. An expression with a missing
/// comparison operator, or with a p-value outside [0, 1], is reported as a
/// diagnostic and not as a mention. Mentions are ordered by span.
StatExtraction extract_stat_mentions_with_diagnostics(std::string_view text);

std::vector<StatMention> extract_stat_mentions(std::string_view text);

enum class SampleSizeSource { free_text_N, chi2_arg, derived_from_df };
const char *to_string(SampleSizeSource s);

struct SampleSizeMention {
  int value = 1;
  SampleSizeSource source = SampleSizeSource::free_text_N;
  CharSpan span;

  bool operator==(const SampleSizeMention &) const = default;
};

/// Collects sample sizes from free-text "N = n" / "n = n", chi-square
/// "N = n" arguments, the chi-square second argument when no "N =" is
/// given, and df + 1 for t tests. Free-text matches that fall inside a
/// chi-square mention are attributed to that mention. Ordered by span,
/// duplicates on (value, span) removed.
std::vector<SampleSizeMention>
derive_sample_sizes(std::string_view text,
                    const std::vector<StatMention> &mentions);

enum class SampleSizeAggregation { max, min, sum };

struct StatFeatures {
  double real_p = 1.0;
  int real_p_sign = 0;
  double p_val_range = 0.0;
  int num_hypo_tested = 0;
  bool extend_p = false;
  int num_significant = 0;
  std::optional<int> sample_size;

  // true where the value above is an imputed default rather than observed.
  struct Defaults {
    bool real_p = true;
    bool real_p_sign = true;
    bool p_val_range = true;
    bool num_hypo_tested = true;
    bool extend_p = true;
    bool num_significant = true;
    bool sample_size = true;
  } is_default;
};

/// Significance threshold used by num_significant.
inline constexpr double kSignificanceLevel = 0.05;

StatFeatures derive_statistical_features(
    const std::vector<StatMention> &mentions,
    const std::vector<SampleSizeMention> &sample_sizes,
    SampleSizeAggregation aggregation = SampleSizeAggregation::max);

/// Structured per-paper diagnostics record (JSON text).
std::string diagnostics_to_json(std::string_view paper_id,
                                const std::vector<StatDiagnostic> &diags);

} // namespace reprofeat
