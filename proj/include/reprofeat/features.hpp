#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "reprofeat/ingest.hpp"
#include "reprofeat/matchers.hpp"
#include "reprofeat/metaclients.hpp"
#include "reprofeat/statparse.hpp"

namespace reprofeat {

inline constexpr std::size_t kFeatureCount = 41;

/// Canonical column order: bibliometric, author, venue, statistical,
/// semantic.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    // bibliometric
    "num_citations", "normalized_citations", "citation_Velocity",
    "citation_next", "influentialCitationCount", "influentialReferencesCount",
    "references_count", "self_citations", "openaccessflag", "age", "coCite2",
    "coCite3", "u_rank",
    // author
    "author_count", "avg_pub", "avg_hidx", "avg_high_inf_cites",
    "avg_auth_cites",
    // venue
    "Venue_CiteScore", "Venue_SNIP", "Venue_Scholarly_Output",
    "Venue_Percent_Cited", "Venue_Citation_Count", "SJR",
    // statistical
    "real_p", "real_p_sign", "p_val_range", "num_hypo_tested", "extend_p",
    "num_significant", "sample_size",
    // semantic
    "reference_background", "reference_methodology", "reference_result",
    "citations_background", "citations_methodology", "citations_result",
    "upstream_influential_methodology_count", "funded", "subject",
    "subject_code"};

/// Index of a canonical feature name; throws on unknown names.
std::size_t feature_index(std::string_view name);

/// subject and subject_code hold category ids and are left out of the
/// correlation and scoring analyses.
bool is_categorical_feature(std::string_view name);

struct FeatureVector {
  std::string paper_id;
  std::array<double, kFeatureCount> values{};
  std::array<bool, kFeatureCount> is_default{};

  double value(std::string_view name) const {
    return values[feature_index(name)];
  }
  bool defaulted(std::string_view name) const {
    return is_default[feature_index(name)];
  }
};

/// ASJC subject-field lookup: field code -> name, plus the five subject
/// areas derived from the code's two leading digits.
class SubjectTable {
public:
  SubjectTable() = default;
  /// Lines "code<TAB>field name"; '#' comments allowed.
  static SubjectTable load(const std::filesystem::path &file);

  void add(int code, std::string_view name);
  std::optional<int> code_for(std::string_view field_name) const;
  bool known(int code) const { return names_.count(code) != 0; }

  /// 1 Multidisciplinary, 2 Life Sciences, 3 Social Sciences & Humanities,
  /// 4 Physical Sciences, 5 Health Sciences; 0 when the code is unknown.
  static int area_id(int asjc_code);

private:
  std::map<int, std::string> names_;
  std::map<std::string, int, std::less<>> by_name_;
};

struct CoCitation {
  int cocite2 = 0;
  int cocite3 = 0;
  bool is_default = true;
};

/// Counts papers co-cited with the target (co-citation index >= 1)
/// published within [Y0, Y0 + 2] and [Y0, Y0 + 3]. The target itself and
/// papers without a known year are not counted.
CoCitation co_citation_features(const std::string &target_id, int pub_year,
                                CitationGraph *graph);

/// True when the acknowledgement text names a funding source.
bool funding_heuristic(std::string_view ack_text);

struct MatchThresholds {
  double author = kAuthorMatchThreshold;
  double university = kUniversityMatchThreshold;
};

/// Derives all 41 features. Values absent upstream get the documented
/// default and is_default = true. Requires now_year >= rec.pub_year.
FeatureVector derive_features(const PaperRecord &rec,
                              const ProviderRecord &meta,
                              const VenueMetrics &venue,
                              const std::vector<AuthorMetrics> &authors,
                              const StatFeatures &stats,
                              const RankTable &rank, int now_year,
                              const std::optional<CoCitation> &cocite = {},
                              const SubjectTable &subjects = {},
                              const MatchThresholds &thresholds = {});

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct FeatureMatrix {
  std::vector<std::string> paper_ids;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;  // papers x features
  MaskMatrix is_default;   // true where the value was imputed
  std::vector<std::optional<bool>> labels;

  std::size_t rows() const { return paper_ids.size(); }
  std::size_t cols() const { return feature_names.size(); }
  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t real_count(std::size_t col) const;

  FeatureMatrix select_columns(const std::vector<std::size_t> &cols) const;
  FeatureMatrix select_columns(const std::vector<std::string> &names) const;
  FeatureMatrix select_rows(const std::vector<std::size_t> &rows) const;
  /// Rows whose label is known, and the labels as 0/1.
  FeatureMatrix labeled_rows() const;
  std::vector<int> binary_labels() const;
};

FeatureMatrix assemble_matrix(const std::vector<FeatureVector> &vectors,
                              const std::vector<std::optional<bool>> &labels);

/// Drops every column with fewer than `min_real` non-default values.
FeatureMatrix filter_core_features(const FeatureMatrix &m, int min_real = 15);

/// Writes a delimited table (`paper_id,label,<features...>`) and a parallel
/// mask table with 1 where the value is a default. Lines in `provenance` are
/// written first as '#' comments.
void write_matrix(const FeatureMatrix &m,
                  const std::filesystem::path &values_csv,
                  const std::filesystem::path &mask_csv,
                  const std::vector<std::string> &provenance = {});
FeatureMatrix read_matrix(const std::filesystem::path &values_csv,
                          const std::filesystem::path &mask_csv);

/// Shortest text that round-trips the double.
std::string format_number(double v);

} // namespace reprofeat
