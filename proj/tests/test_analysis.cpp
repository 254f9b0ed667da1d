#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "reprofeat/analysis.hpp"
#include "support.hpp"

using namespace reprofeat;

namespace {

FeatureMatrix from_columns(const std::vector<std::vector<double>> &cols,
                           const std::vector<int> &y = {}) {
  FeatureMatrix m;
  const auto n = static_cast<Eigen::Index>(cols.at(0).size());
  const auto d = static_cast<Eigen::Index>(cols.size());
  m.values.resize(n, d);
  m.is_default = MaskMatrix::Constant(n, d, false);
  for (Eigen::Index j = 0; j < d; ++j) {
    m.feature_names.push_back("c" + std::to_string(j));
    for (Eigen::Index i = 0; i < n; ++i)
      m.values(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    m.paper_ids.push_back("r" + std::to_string(i));
    if (y.empty())
      m.labels.push_back(std::nullopt);
    else
      m.labels.push_back(y[static_cast<std::size_t>(i)] == 1);
  }
  return m;
}

std::vector<double> column(const Eigen::MatrixXd &X, Eigen::Index j) {
  return {X.col(j).data(), X.col(j).data() + X.rows()};
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("kendall tau examples") {
  CHECK(kendall_tau({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(kendall_tau({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(kendall_tau({1, 2, 3}, {1, 3, 2}) == doctest::Approx(1.0 / 3.0));
  CHECK(kendall_tau({1, 1, 1}, {1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(kendall_tau({1, 2}, {1}), Error);
  CHECK_THROWS_AS(kendall_tau({1}, {1}), Error);
}

TEST_CASE("kendall tau agrees with the pair counter on tied data") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + static_cast<int>(rng() % 49);
    std::uniform_int_distribution<int> small(0, 4);
    std::vector<double> x(n), y(n), neg(n);
    for (int i = 0; i < n; ++i) {
      x[i] = small(rng);
      y[i] = small(rng) + 0.5 * x[i];
    }
    CHECK(kendall_tau(x, y) == doctest::Approx(kendall_tau_bruteforce(x, y)).epsilon(1e-12));
    // antisymmetry on tie-free y
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<double>(i) + 0.1 * static_cast<double>(rng() % 7);
      neg[i] = -y[i];
    }
    CHECK(kendall_tau(x, neg) == doctest::Approx(-kendall_tau(x, y)));
  }
}

TEST_CASE("tau_matrix skips default cells pairwise") {
  auto m = from_columns({{1, 2, 3, 4}, {1, 2, 3, 100}, {4, 3, 2, 1}});
  m.is_default(3, 1) = true;
  auto t = tau_matrix(m);
  CHECK(t(0, 1) == doctest::Approx(1.0));
  CHECK(t(1, 0) == t(0, 1));
  CHECK(t(0, 2) == doctest::Approx(-1.0));
  CHECK(t(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("duplicated columns: exactly one dropped") {
  auto m = from_columns({{1, 5, 2, 8, 3}, {1, 5, 2, 8, 3}, {2, 1, 4, 3, 5}});
  auto r = correlation_prune(m);
  REQUIRE(r.drops.size() == 1);
  // equal real counts: the later column goes
  CHECK(r.drops[0].dropped == "c1");
  CHECK(r.drops[0].partner == "c0");
  CHECK(r.matrix.cols() == 2);
}

TEST_CASE("planted pairs") {
  for (bool shared : {true, false}) {
    CAPTURE(shared);
    auto pp = testsupport::planted_pairs(shared);
    auto r = correlation_prune(pp.matrix);
    CHECK(r.matrix.cols() == (shared ? 33u : 32u));
    std::set<std::string> dropped;
    for (const auto &d : r.drops)
      dropped.insert(d.dropped);
    for (const auto &[loser, winner] : pp.pairs) {
      CHECK(dropped.count(loser) == 1);
      CHECK(r.matrix.column(winner).has_value());
    }
    auto again = tau_matrix(r.matrix);
    for (Eigen::Index i = 0; i < again.rows(); ++i)
      for (Eigen::Index j = i + 1; j < again.cols(); ++j)
        CHECK(again(i, j) <= kTauThreshold);
  }
}

TEST_CASE("weak correlation: no drops") {
  // largest |tau| is 2/3 (c0, c1)
  auto m = from_columns({{1, 2, 3, 4}, {1, 3, 2, 4}, {4, 1, 3, 2}});
  auto t = tau_matrix(m);
  REQUIRE(t.cwiseAbs().triangularView<Eigen::StrictlyUpper>().toDenseMatrix().maxCoeff() <= 0.7);
  CHECK(correlation_prune(m).drops.empty());
}

TEST_CASE("anova examples") {
  Eigen::MatrixXd X(6, 1);
  X << 1, 2, 3, 4, 5, 6;
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  auto s = anova_f_scores(X, y);
  CHECK(std::abs(s.values[0] - 13.5) < 1e-9);
  CHECK_FALSE(s.degenerate[0]);

  Eigen::MatrixXd shifted = (X.array() * 3.7 + 11.0).matrix();
  CHECK(anova_f_scores(shifted, y).values[0] == doctest::Approx(13.5).epsilon(1e-9));

  Eigen::MatrixXd same(6, 1);
  same << 1, 2, 3, 3, 2, 1;
  CHECK(anova_f_scores(same, y).values[0] == doctest::Approx(0.0));

  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(6, 1, 4.0);
  auto c = anova_f_scores(constant, y);
  CHECK(c.values[0] == 0.0);
  CHECK(c.degenerate[0]);

  CHECK_THROWS_AS(anova_f_scores(X, {1, 1, 1, 1, 1, 1}), Error);
}

TEST_CASE("mutual information") {
  const int n = 2000;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(n, 2);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    X(i, 0) = g(rng);
    X(i, 1) = y[i];
  }
  auto s = mutual_info_scores(X, y);
  CHECK(s.values[0] <= 0.05);
  CHECK(s.values[0] >= 0.0);
  CHECK(s.values[1] == doctest::Approx(std::log(2.0)).epsilon(0.15));

  // deterministic for a seed
  CHECK(mutual_info_scores(X, y).values == s.values);

  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = g(rng);
    b[i] = 0.9 * a[i] + std::sqrt(1 - 0.81) * g(rng);
    c[i] = g(rng);
  }
  CHECK(std::abs(mutual_info_continuous(a, b) - 0.830) < 0.1);
  const double indep = mutual_info_continuous(a, c);
  CHECK(indep >= 0.0);
  CHECK(indep <= 0.05);
}

TEST_CASE("score and matrix normalization") {
  CHECK(normalize_scores({2, 4}) == std::vector<double>{0.5, 1.0});
  CHECK(normalize_scores({0, 0}) == std::vector<double>{0, 0});
  CHECK(normalize_scores({2, INFINITY}) == std::vector<double>{1.0, 1.0});

  auto m = from_columns({{0, 5, 10}, {3, 3, 3}});
  std::vector<std::string> constant;
  auto n = min_max_normalize(m, &constant);
  CHECK(column(n.values, 0) == std::vector<double>{0, 0.5, 1.0});
  CHECK(column(n.values, 1) == std::vector<double>{0, 0, 0});
  CHECK(constant == std::vector<std::string>{"c1"});
}

TEST_CASE("selection") {
  auto m = testsupport::planted_signal(200, 3, 7, 1.5, 5);
  auto ranking = anova_ranking(m);
  std::set<std::string> lead(ranking.begin(), ranking.begin() + 3);
  CHECK(lead == std::set<std::string>{"signal_0", "signal_1", "signal_2"});

  CHECK(select_top_features(m, 0, {"noise_5"}) == std::vector<std::string>{"noise_5"});
  auto top = select_top_features(m, 3, {"signal_1"});
  CHECK(top.size() == 3);
  CHECK(std::set<std::string>(top.begin(), top.end()).size() == 3);
  CHECK(select_top_features(m, 3, {"noise_9"}).back() == "noise_9");
  CHECK_THROWS_AS(select_top_features(m, 3, {"citations_methodology"}), Error);
}

TEST_CASE("sweep") {
  auto m = testsupport::planted_signal(100, 3, 7, 1.5, 5);
  auto one = sweep_top_features(m, ClassifierKind::gauss_nb, 1, 2, 9);
  REQUIRE(one.size() == 1);
  CHECK(one[0].k == 1);
  CHECK(one[0].features.size() == 1);
  CHECK(one[0].f1.size() == 10);
  CHECK(one[0].q1 <= one[0].median);
  CHECK(one[0].median <= one[0].q3);
  auto again = sweep_top_features(m, ClassifierKind::gauss_nb, 1, 2, 9);
  CHECK(again[0].f1 == one[0].f1);
}

TEST_CASE("analyze report round trip") {
  auto pp = testsupport::planted_pairs(true);
  AnalysisOptions opts;
  opts.mi_extras = {"f30"};
  auto report = analyze(pp.matrix, opts);
  CHECK(report.reduced_features.size() == 33);
  CHECK(report.selected_features.size() >= 8);
  for (double v : report.anova_f_normalized) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (double v : report.mutual_info)
    CHECK(v >= 0.0);
  auto back = AnalysisReport::from_json(report.to_json());
  CHECK(back.to_json() == report.to_json());

  opts.mi_extras = {"f1"}; // pruned away: warning, not an error
  auto warned = analyze(pp.matrix, opts);
  CHECK_FALSE(warned.warnings.empty());
}

}
