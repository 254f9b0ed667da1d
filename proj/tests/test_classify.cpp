#include <doctest.h>

#include <map>

#include "reprofeat/classify.hpp"
#include "support.hpp"

using namespace reprofeat;

TEST_SUITE("classify") {

TEST_CASE("classifier ids") {
  CHECK(all_classifiers().size() == 8);
  for (auto k : all_classifiers())
    CHECK(classifier_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(classifier_from_string("perceptron"), Error);
}

TEST_CASE("knn: a point duplicated five times decides its own label") {
  Eigen::MatrixXd X(8, 2);
  X << 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, //
      5, 5, 6, 5, 5, 6;
  const std::vector<int> y = {1, 1, 1, 1, 1, 0, 0, 0};
  auto m = fit(ClassifierKind::knn, X, y);
  Eigen::MatrixXd q(1, 2);
  q << 0, 0;
  CHECK(m->predict(q) == std::vector<int>{1});
}

TEST_CASE("stratified folds") {
  std::vector<int> y(20);
  for (int i = 0; i < 10; ++i)
    y[i] = 1;
  auto folds = stratified_kfold(y, 5, 42);
  REQUIRE(folds.size() == 20);
  std::map<int, std::pair<int, int>> per_fold;
  for (std::size_t i = 0; i < y.size(); ++i)
    (y[i] ? per_fold[folds[i]].first : per_fold[folds[i]].second)++;
  CHECK(per_fold.size() == 5);
  for (const auto &[f, counts] : per_fold) {
    CHECK(counts.first == 2);
    CHECK(counts.second == 2);
  }

  // 11 / 9: per-fold counts within one of the global ratio
  std::vector<int> y2(20, 0);
  for (int i = 0; i < 11; ++i)
    y2[i] = 1;
  auto f2 = stratified_kfold(y2, 5, 1);
  std::map<int, int> pos, total;
  for (std::size_t i = 0; i < y2.size(); ++i) {
    pos[f2[i]] += y2[i];
    total[f2[i]]++;
  }
  for (int f = 0; f < 5; ++f) {
    CHECK(total[f] == 4);
    CHECK(pos[f] >= 2);
    CHECK(pos[f] <= 3);
  }

  CHECK(stratified_kfold(y2, 5, 1) == f2);
  CHECK_THROWS_AS(stratified_kfold({1, 1, 1, 1, 0, 0, 0}, 5, 1), Error);
}

TEST_CASE("metrics") {
  auto m = compute_metrics({1, 0, 1, 0}, {1, 1, 1, 1});
  CHECK(m.precision == doctest::Approx(0.5));
  CHECK(m.recall == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  auto none = compute_metrics({1, 0}, {0, 0});
  CHECK(none.f1 == 0.0);
  CHECK(none.fn == 1);
  CHECK(none.tn == 1);
}

TEST_CASE("fit errors") {
  auto ds = testsupport::separable(20, 1);
  CHECK_THROWS_AS(fit(ClassifierKind::logreg, ds.X, std::vector<int>(20, 1)), Error);
  CHECK_THROWS_AS(fit(ClassifierKind::logreg, Eigen::MatrixXd(20, 0), ds.y), Error);
  CHECK_THROWS_AS(fit(ClassifierKind::logreg, ds.X, std::vector<int>(19, 1)), Error);
}

TEST_CASE("every classifier separates separable data") {
  auto ds = testsupport::separable(200, 1);
  for (auto k : all_classifiers()) {
    CAPTURE(to_string(k));
    auto cv = cross_validate(k, ds.X, ds.y, 5, 1, 3);
    CHECK(cv.mean_f1 >= 0.95);
    CHECK(cv.folds.size() == 5);
  }
  auto model = fit(ClassifierKind::logreg, ds.X, ds.y);
  CHECK(compute_metrics(ds.y, model->predict(ds.X)).f1 == doctest::Approx(1.0));
}

TEST_CASE("predictions ignore column order") {
  auto ds = testsupport::separable(80, 4, 3);
  Eigen::MatrixXd swapped(ds.X.rows(), 3);
  swapped.col(0) = ds.X.col(2);
  swapped.col(1) = ds.X.col(0);
  swapped.col(2) = ds.X.col(1);
  for (auto k : all_classifiers()) {
    CAPTURE(to_string(k));
    auto a = fit(k, ds.X, ds.y)->predict(ds.X);
    auto b = fit(k, swapped, ds.y)->predict(swapped);
    CHECK(a == b);
  }
}

TEST_CASE("svm dual solution satisfies KKT") {
  auto ds = testsupport::xor_data(120, 2);
  auto m = fit(ClassifierKind::svm_rbf, ds.X, ds.y);
  auto d = svm_diagnostics(*m);
  CHECK(d.kkt_violation <= 1e-3);
  CHECK(d.gamma > 0);
  CHECK((d.alpha.array() >= -1e-12).all());
  CHECK((d.alpha.array() <= d.c + 1e-12).all());
  CHECK_THROWS_AS(svm_diagnostics(*fit(ClassifierKind::knn, ds.X, ds.y)), Error);
}

TEST_CASE("adaboost training error is tracked per round") {
  auto ds = testsupport::separable(100, 5);
  ClassifierParams p;
  p.adaboost_rounds = 20;
  auto m = fit(ClassifierKind::adaboost, ds.X, ds.y, p);
  auto errs = adaboost_staged_errors(*m, ds.X, ds.y);
  REQUIRE_FALSE(errs.empty());
  CHECK(errs.size() <= 20);
  CHECK(errs.back() <= errs.front());
}

TEST_CASE("xor: trees beat the linear model") {
  auto ds = testsupport::xor_data(200, 3);
  auto lin = cross_validate(ClassifierKind::logreg, ds.X, ds.y, 5, 1, 4);
  CHECK(lin.mean_f1 >= 0.3);
  CHECK(lin.mean_f1 <= 0.7);
  CHECK(cross_validate(ClassifierKind::dtree, ds.X, ds.y, 5, 1, 4).mean_f1 >= 0.95);
}

TEST_CASE("cross-validation is reproducible and serializable") {
  auto ds = testsupport::separable(60, 8);
  auto a = cross_validate(ClassifierKind::rforest, ds.X, ds.y, 5, 2, 10);
  auto b = cross_validate(ClassifierKind::rforest, ds.X, ds.y, 5, 2, 10);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.assignments.size() == 2);
  CHECK(a.folds.size() == 10);
  CHECK(a.to_json()["folds"].size() == 10);
}

}
