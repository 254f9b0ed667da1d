#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "reprofeat/ingest.hpp"

namespace reprofeat {

enum class ClassifierKind {
  logreg,
  knn,
  dtree,
  rforest,
  adaboost,
  gauss_nb,
  qda,
  svm_rbf
};

std::string to_string(ClassifierKind k);
/// Throws Error for unknown ids.
ClassifierKind classifier_from_string(std::string_view id);
const std::vector<ClassifierKind> &all_classifiers();

struct ClassifierParams {
  int knn_k = 5;
  int dtree_max_depth = -1; // unlimited
  int rforest_trees = 200;
  int rforest_max_depth = 2;
  int adaboost_rounds = 50;
  double svm_c = 1.0;
  std::optional<double> svm_gamma; // default 1 / (d * var(X))
  double svm_tol = 1e-3;
  long long svm_max_iter = 10'000'000;
  double logreg_lambda = 1e-4;
  int logreg_max_iter = 1000;
  double logreg_tol = 1e-6;
  double nb_var_floor = 1e-9;
  double qda_reg = 1e-6;
  std::uint64_t seed = 42;
};

/// A fitted model. Columns are put into a canonical order at fit time, so
/// predictions do not depend on the order of the input columns.
class Model {
public:
  virtual ~Model() = default;
  ClassifierKind kind() const { return kind_; }
  std::size_t n_features() const { return order_.size(); }
  /// One 0/1 label per row; score ties go to the positive class.
  std::vector<int> predict(const Eigen::MatrixXd &X) const;
  /// Input column feeding each canonical column.
  const std::vector<Eigen::Index> &column_order() const { return order_; }

protected:
  explicit Model(ClassifierKind k) : kind_(k) {}
  virtual std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const = 0;

private:
  friend std::unique_ptr<Model> fit(ClassifierKind, const Eigen::MatrixXd &,
                                    const std::vector<int> &,
                                    const ClassifierParams &);
  ClassifierKind kind_;
  std::vector<Eigen::Index> order_;
};

/// Throws Error when y holds a single class, d == 0, or sizes disagree.
std::unique_ptr<Model> fit(ClassifierKind kind, const Eigen::MatrixXd &X,
                           const std::vector<int> &y,
                           const ClassifierParams &params = {});

/// Dual solution of a fitted svm_rbf model.
struct SvmDiagnostics {
  Eigen::VectorXd alpha;
  double c = 0;
  double rho = 0;
  double gamma = 0;
  double kkt_violation = 0; // max_{I_up} -yG - min_{I_low} -yG
  long long iterations = 0;
};
/// Throws Error when the model is not svm_rbf.
SvmDiagnostics svm_diagnostics(const Model &m);

/// Training error of the boosted ensemble after each round.
std::vector<double> adaboost_staged_errors(const Model &m,
                                           const Eigen::MatrixXd &X,
                                           const std::vector<int> &y);

struct Metrics {
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f1 = 0;
};
/// Metrics for the positive class; F1 = 0 when P + R = 0.
Metrics compute_metrics(const std::vector<int> &y_true,
                        const std::vector<int> &y_pred);

/// Fold index per row. Rows of each class are shuffled with the seed and
/// dealt round-robin, continuing the fold counter across classes.
/// Throws Error when a class has fewer than k members.
std::vector<int> stratified_kfold(const std::vector<int> &y, int k,
                                  std::uint64_t seed);

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  Metrics metrics;
};

struct CVResult {
  ClassifierKind kind = ClassifierKind::logreg;
  int k = 5;
  int repeats = 1;
  std::uint64_t seed = 42;
  std::vector<FoldResult> folds;
  std::vector<std::vector<int>> assignments; // per repeat
  double mean_precision = 0, mean_recall = 0, mean_f1 = 0;

  nlohmann::json to_json() const;
};

/// Repeat r draws its folds from seed + r.
CVResult cross_validate(ClassifierKind kind, const Eigen::MatrixXd &X,
                        const std::vector<int> &y, int k = 5, int repeats = 1,
                        std::uint64_t seed = 42,
                        ClassifierParams params = {});

} // namespace reprofeat
