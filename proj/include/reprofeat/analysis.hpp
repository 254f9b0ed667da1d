#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "reprofeat/classify.hpp"
#include "reprofeat/features.hpp"

namespace reprofeat {

inline constexpr double kTauThreshold = 0.8;

/// Tau-b in O(n log n). Throws Error on length mismatch or n < 2.
/// Returns 0 when either vector is constant.
double kendall_tau(const std::vector<double> &x, const std::vector<double> &y);
/// O(n^2) pair counter with the same tie handling, for cross-checking.
double kendall_tau_bruteforce(const std::vector<double> &x,
                              const std::vector<double> &y);

/// Pairwise tau between all columns. Rows where either cell is a default
/// are skipped for that pair; pairs with fewer than 2 shared real rows get 0.
Eigen::MatrixXd tau_matrix(const FeatureMatrix &m);

struct DropEntry {
  std::string dropped;
  std::string partner;
  double tau = 0;
};

struct PruneResult {
  FeatureMatrix matrix;
  std::vector<DropEntry> drops;
  std::vector<std::string> tau_features; // columns that entered the tau grid
  Eigen::MatrixXd tau;
};

/// Greedy over pairs with tau > threshold in descending tau order. Of each
/// still-present pair, the column with fewer real values is dropped; on a
/// tie the later column goes. Categorical columns are neither compared nor
/// dropped.
PruneResult correlation_prune(const FeatureMatrix &m,
                              double threshold = kTauThreshold);

struct Scores {
  std::vector<double> values;
  std::vector<bool> degenerate;
};

/// Two-group F = (SSB / (k - 1)) / (SSW / (n - k)) per column. A constant
/// column scores 0 and a column with zero within-group spread but distinct
/// group means scores +inf; both are flagged. Throws on single-class labels.
Scores anova_f_scores(const Eigen::MatrixXd &X, const std::vector<int> &y);

/// kNN mutual information between each column and the binary label, in
/// nats, clipped at 0. Columns are scaled to unit variance and jittered with
/// 1e-10 noise drawn from `seed`.
Scores mutual_info_scores(const Eigen::MatrixXd &X, const std::vector<int> &y,
                          int k = 3, std::uint64_t seed = 42);

/// Kraskov estimator for two continuous variables (same preprocessing).
double mutual_info_continuous(const std::vector<double> &x,
                              const std::vector<double> &y, int k = 3,
                              std::uint64_t seed = 42);

/// Divides by the largest finite score (+inf maps to 1); all zeros when the
/// maximum is not positive.
std::vector<double> normalize_scores(const std::vector<double> &scores);

/// (X - min) / (max - min) per column; constant columns become 0 and their
/// names are appended to `constant_columns` when given.
FeatureMatrix min_max_normalize(const FeatureMatrix &m,
                                std::vector<std::string> *constant_columns = nullptr);

/// Non-categorical columns ranked by descending ANOVA-F; ties keep column
/// order.
std::vector<std::string> anova_ranking(const FeatureMatrix &labeled);

/// Top `n_anova` by ANOVA-F, then each of `mi_extras` not already present,
/// then the `n_mi_auto` best remaining columns by MI. Throws on an extra
/// that is not a column of the matrix.
std::vector<std::string>
select_top_features(const FeatureMatrix &labeled, int n_anova = 8,
                    const std::vector<std::string> &mi_extras = {"citations_methodology"},
                    int n_mi_auto = 0, int mi_k = 3, std::uint64_t seed = 42);

struct SweepPoint {
  int k = 0;
  std::vector<std::string> features;
  std::vector<double> f1; // one per fold per repeat
  double mean = 0, median = 0, q1 = 0, q3 = 0;
};

/// For k = 1..max_k, repeated stratified 5-fold CV on the top-k ANOVA-F
/// columns.
std::vector<SweepPoint> sweep_top_features(const FeatureMatrix &labeled,
                                           ClassifierKind kind, int max_k,
                                           int repeats = 5,
                                           std::uint64_t seed = 42,
                                           const ClassifierParams &params = {});

struct AnalysisOptions {
  double tau_threshold = kTauThreshold;
  int mi_k = 3;
  std::uint64_t seed = 42;
  int n_anova = 8;
  std::vector<std::string> mi_extras = {"citations_methodology"};
  int n_mi_auto = 0;
};

struct AnalysisReport {
  std::vector<std::string> core_features;
  std::vector<std::string> tau_features;
  Eigen::MatrixXd tau;
  std::vector<DropEntry> dropped;
  std::vector<std::string> reduced_features;
  std::vector<std::string> score_features;
  std::vector<double> anova_f, anova_f_normalized;
  std::vector<bool> anova_degenerate;
  std::vector<double> mutual_info, mutual_info_normalized;
  std::vector<std::string> selected_features;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static AnalysisReport from_json(const nlohmann::json &j);
};

/// Prunes `core`, then scores the surviving non-categorical columns on the
/// labeled rows and selects the top features. MI extras missing from the
/// pruned matrix are skipped with a warning.
AnalysisReport analyze(const FeatureMatrix &core, const AnalysisOptions &opts = {});

} // namespace reprofeat
