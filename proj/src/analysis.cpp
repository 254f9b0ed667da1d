#include "reprofeat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/special_functions/digamma.hpp>

namespace reprofeat {

namespace {

using boost::math::digamma;

void check_pair(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size())
    throw Error("kendall_tau: vectors differ in length (" +
                std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                ")");
  if (x.size() < 2)
    throw Error("kendall_tau: need at least 2 observations");
}

long long tie_pairs(long long run) { return run * (run - 1) / 2; }

double tau_from_counts(long long n0, long long n1, long long n2, long long s) {
  if (n0 == n1 || n0 == n2)
    return 0.0;
  return static_cast<double>(s) /
         std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

// Counts strict inversions while merge-sorting v.
long long merge_count(std::vector<double> &v, std::vector<double> &buf,
                      std::size_t lo, std::size_t hi) {
  if (hi - lo < 2)
    return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid)
    buf[k++] = v[i++];
  while (j < hi)
    buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::vector<double> column(const Eigen::MatrixXd &X, Eigen::Index j) {
  return {X.col(j).data(), X.col(j).data() + X.rows()};
}

std::vector<double> scale_and_jitter(std::vector<double> x, std::mt19937_64 &rng) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0;
  for (double v : x)
    var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (sd > 0)
    for (auto &v : x)
      v /= sd;
  double mean_abs = 0;
  for (double v : x)
    mean_abs += std::abs(v);
  const double amp = 1e-10 * std::max(1.0, mean_abs / n);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto &v : x)
    v += amp * noise(rng);
  return x;
}

// Points of the sorted vector within `r` of `x`, self included.
std::size_t count_within(const std::vector<double> &sorted, double x, double r) {
  auto lo = std::partition_point(sorted.begin(), sorted.end(),
                                 [&](double v) { return x - v > r; });
  auto hi = std::partition_point(sorted.begin(), sorted.end(),
                                 [&](double v) { return v - x <= r; });
  return static_cast<std::size_t>(hi - lo);
}

// Distance to the k-th nearest other point of sorted[p].
double kth_neighbor_distance(const std::vector<double> &sorted, std::size_t p,
                             int k) {
  std::ptrdiff_t l = static_cast<std::ptrdiff_t>(p) - 1;
  std::size_t r = p + 1;
  double d = 0;
  for (int step = 0; step < k; ++step) {
    const double dl = l >= 0 ? sorted[p] - sorted[static_cast<std::size_t>(l)]
                             : std::numeric_limits<double>::infinity();
    const double dr = r < sorted.size() ? sorted[r] - sorted[p]
                                        : std::numeric_limits<double>::infinity();
    if (dl <= dr) {
      d = dl;
      --l;
    } else {
      d = dr;
      ++r;
    }
  }
  return d;
}

double mi_discrete(const std::vector<double> &x, const std::vector<int> &y,
                   int k) {
  const std::size_t n = x.size();
  std::vector<double> radius(n, 0);
  std::vector<int> k_used(n, 0);
  std::vector<std::size_t> label_count(n, 0);
  for (int c : {0, 1}) {
    std::vector<std::pair<double, std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i)
      if (y[i] == c)
        members.emplace_back(x[i], i);
    if (members.size() < 2)
      continue;
    std::sort(members.begin(), members.end());
    std::vector<double> sorted;
    for (const auto &m : members)
      sorted.push_back(m.first);
    const int kc = std::min<int>(k, static_cast<int>(members.size()) - 1);
    for (std::size_t p = 0; p < members.size(); ++p) {
      const std::size_t i = members[p].second;
      radius[i] = kth_neighbor_distance(sorted, p, kc);
      k_used[i] = kc;
      label_count[i] = members.size();
    }
  }
  std::vector<double> kept;
  std::vector<std::size_t> kept_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (label_count[i] > 1) {
      kept.push_back(x[i]);
      kept_idx.push_back(i);
    }
  if (kept.size() < 2)
    return 0.0;
  std::vector<double> sorted = kept;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(kept.size());
  double psi_k = 0, psi_label = 0, psi_m = 0;
  for (std::size_t t = 0; t < kept.size(); ++t) {
    const std::size_t i = kept_idx[t];
    const double r = std::nextafter(radius[i], 0.0);
    psi_k += digamma(static_cast<double>(k_used[i]));
    psi_label += digamma(static_cast<double>(label_count[i]));
    psi_m += digamma(static_cast<double>(count_within(sorted, x[i], r)));
  }
  const double mi = digamma(m) + psi_k / m - psi_label / m - psi_m / m;
  return std::max(0.0, mi);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty())
    return 0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

std::vector<std::size_t> numeric_columns(const FeatureMatrix &m) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!is_categorical_feature(m.feature_names[j]))
      out.push_back(j);
  return out;
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

// ---------------------------------------------------------------------------

double kendall_tau(const std::vector<double> &x, const std::vector<double> &y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
  long long n1 = 0, n3 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]])
      ++j;
    n1 += tie_pairs(static_cast<long long>(j - i));
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && y[idx[b]] == y[idx[a]])
        ++b;
      n3 += tie_pairs(static_cast<long long>(b - a));
      a = b;
    }
    i = j;
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[idx[i]];
  const long long swaps = merge_count(ys, buf, 0, n);
  long long n2 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && ys[j] == ys[i])
      ++j;
    n2 += tie_pairs(static_cast<long long>(j - i));
    i = j;
  }
  return tau_from_counts(n0, n1, n2, n0 - n1 - n2 + n3 - 2 * swaps);
}

double kendall_tau_bruteforce(const std::vector<double> &x,
                              const std::vector<double> &y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  long long s = 0, n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int sx = (x[i] < x[j]) - (x[j] < x[i]);
      const int sy = (y[i] < y[j]) - (y[j] < y[i]);
      s += sx * sy;
      n1 += sx == 0;
      n2 += sy == 0;
    }
  const long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
  return tau_from_counts(n0, n1, n2, s);
}

Eigen::MatrixXd tau_matrix(const FeatureMatrix &m) {
  const auto d = static_cast<Eigen::Index>(m.cols());
  Eigen::MatrixXd tau = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b) {
      std::vector<double> x, y;
      for (Eigen::Index r = 0; r < m.values.rows(); ++r)
        if (!m.is_default(r, a) && !m.is_default(r, b)) {
          x.push_back(m.values(r, a));
          y.push_back(m.values(r, b));
        }
      tau(a, b) = tau(b, a) = x.size() < 2 ? 0.0 : kendall_tau(x, y);
    }
  return tau;
}

PruneResult correlation_prune(const FeatureMatrix &m, double threshold) {
  const auto numeric = numeric_columns(m);
  PruneResult res;
  const FeatureMatrix sub = m.select_columns(numeric);
  res.tau_features = sub.feature_names;
  res.tau = tau_matrix(sub);

  struct Pair {
    double tau;
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < numeric.size(); ++a)
    for (std::size_t b = a + 1; b < numeric.size(); ++b) {
      const double t = res.tau(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (t > threshold)
        pairs.push_back({t, a, b});
    }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair &p, const Pair &q) { return p.tau > q.tau; });

  std::vector<bool> dropped(m.cols(), false);
  for (const auto &p : pairs) {
    const std::size_t ca = numeric[p.a], cb = numeric[p.b];
    if (dropped[ca] || dropped[cb])
      continue;
    const std::size_t ra = m.real_count(ca), rb = m.real_count(cb);
    const std::size_t drop = ra < rb ? ca : (rb < ra ? cb : std::max(ca, cb));
    const std::size_t keep = drop == ca ? cb : ca;
    dropped[drop] = true;
    res.drops.push_back({m.feature_names[drop], m.feature_names[keep], p.tau});
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!dropped[j])
      keep.push_back(j);
  res.matrix = m.select_columns(keep);
  return res;
}

Scores anova_f_scores(const Eigen::MatrixXd &X, const std::vector<int> &y) {
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw Error("anova_f_scores: X and labels differ in length");
  std::size_t n1 = 0;
  for (int v : y)
    n1 += v == 1;
  const std::size_t n0 = y.size() - n1;
  if (n0 == 0 || n1 == 0)
    throw Error("anova_f_scores: labels contain a single class");
  if (y.size() < 3)
    throw Error("anova_f_scores: need at least 3 rows");

  Scores out;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto col = X.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      out.values.push_back(0.0);
      out.degenerate.push_back(true);
      continue;
    }
    double sum[2] = {0, 0};
    for (std::size_t i = 0; i < y.size(); ++i)
      sum[y[i]] += col(static_cast<Eigen::Index>(i));
    const double mean[2] = {sum[0] / static_cast<double>(n0),
                            sum[1] / static_cast<double>(n1)};
    const double grand = (sum[0] + sum[1]) / static_cast<double>(y.size());
    const double ssb = static_cast<double>(n0) * (mean[0] - grand) * (mean[0] - grand) +
                       static_cast<double>(n1) * (mean[1] - grand) * (mean[1] - grand);
    double ssw = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double dlt = col(static_cast<Eigen::Index>(i)) - mean[y[i]];
      ssw += dlt * dlt;
    }
    if (ssw == 0) {
      out.values.push_back(ssb > 0 ? std::numeric_limits<double>::infinity() : 0.0);
      out.degenerate.push_back(true);
      continue;
    }
    out.values.push_back(ssb / (ssw / static_cast<double>(y.size() - 2)));
    out.degenerate.push_back(false);
  }
  return out;
}

Scores mutual_info_scores(const Eigen::MatrixXd &X, const std::vector<int> &y,
                          int k, std::uint64_t seed) {
  if (k < 1)
    throw Error("mutual_info_scores: k must be >= 1");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw Error("mutual_info_scores: X and labels differ in length");
  if (X.rows() <= k)
    throw Error("mutual_info_scores: need more than k rows");
  std::mt19937_64 rng(seed);
  Scores out;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto x = scale_and_jitter(column(X, j), rng);
    out.values.push_back(mi_discrete(x, y, k));
    out.degenerate.push_back(X.col(j).maxCoeff() == X.col(j).minCoeff());
  }
  return out;
}

double mutual_info_continuous(const std::vector<double> &x_in,
                              const std::vector<double> &y_in, int k,
                              std::uint64_t seed) {
  if (x_in.size() != y_in.size())
    throw Error("mutual_info_continuous: vectors differ in length");
  if (k < 1 || x_in.size() <= static_cast<std::size_t>(k))
    throw Error("mutual_info_continuous: need k >= 1 and more than k points");
  std::mt19937_64 rng(seed);
  const auto x = scale_and_jitter(x_in, rng);
  const auto y = scale_and_jitter(y_in, rng);
  const std::size_t n = x.size();
  std::vector<double> sx = x, sy = y;
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  std::vector<double> dist(n);
  double psi_x = 0, psi_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      dist[j] = j == i ? std::numeric_limits<double>::infinity()
                       : std::max(std::abs(x[j] - x[i]), std::abs(y[j] - y[i]));
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    const double r = std::nextafter(dist[static_cast<std::size_t>(k - 1)], 0.0);
    psi_x += digamma(static_cast<double>(count_within(sx, x[i], r)));
    psi_y += digamma(static_cast<double>(count_within(sy, y[i], r)));
  }
  const double m = static_cast<double>(n);
  const double mi = digamma(m) + digamma(static_cast<double>(k)) - psi_x / m - psi_y / m;
  return std::max(0.0, mi);
}

std::vector<double> normalize_scores(const std::vector<double> &scores) {
  double max_finite = 0;
  for (double s : scores)
    if (std::isfinite(s))
      max_finite = std::max(max_finite, s);
  std::vector<double> out;
  for (double s : scores) {
    if (std::isinf(s) && s > 0)
      out.push_back(1.0);
    else if (!std::isfinite(s) || max_finite <= 0)
      out.push_back(0.0);
    else
      out.push_back(std::max(0.0, s / max_finite));
  }
  return out;
}

FeatureMatrix min_max_normalize(const FeatureMatrix &m,
                                std::vector<std::string> *constant_columns) {
  FeatureMatrix out = m;
  for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
    const double lo = m.values.col(j).minCoeff(), hi = m.values.col(j).maxCoeff();
    if (m.values.rows() == 0)
      continue;
    if (hi > lo) {
      out.values.col(j) = (m.values.col(j).array() - lo) / (hi - lo);
    } else {
      out.values.col(j).setZero();
      if (constant_columns)
        constant_columns->push_back(m.feature_names[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::vector<std::string> anova_ranking(const FeatureMatrix &labeled) {
  const auto numeric = numeric_columns(labeled);
  const FeatureMatrix sub = labeled.select_columns(numeric);
  const Scores f = anova_f_scores(sub.values, sub.binary_labels());
  std::vector<std::size_t> order(numeric.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    return std::isnan(f.values[i]) ? -std::numeric_limits<double>::infinity()
                                   : f.values[i];
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  std::vector<std::string> out;
  for (auto i : order)
    out.push_back(sub.feature_names[i]);
  return out;
}

std::vector<std::string>
select_top_features(const FeatureMatrix &labeled, int n_anova,
                    const std::vector<std::string> &mi_extras, int n_mi_auto,
                    int mi_k, std::uint64_t seed) {
  for (const auto &e : mi_extras)
    if (!labeled.column(e))
      throw Error("unknown feature in MI extras: " + e);
  const auto ranking = anova_ranking(labeled);
  std::vector<std::string> out(
      ranking.begin(),
      ranking.begin() + std::min<std::ptrdiff_t>(std::max(0, n_anova),
                                                 static_cast<std::ptrdiff_t>(ranking.size())));
  auto add = [&](const std::string &name) {
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  };
  for (const auto &e : mi_extras)
    add(e);
  if (n_mi_auto > 0) {
    const auto numeric = numeric_columns(labeled);
    const FeatureMatrix sub = labeled.select_columns(numeric);
    const Scores mi = mutual_info_scores(sub.values, sub.binary_labels(), mi_k, seed);
    std::vector<std::size_t> order(numeric.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mi.values[a] > mi.values[b];
    });
    int added = 0;
    for (auto i : order) {
      if (added == n_mi_auto)
        break;
      if (std::find(out.begin(), out.end(), sub.feature_names[i]) == out.end()) {
        out.push_back(sub.feature_names[i]);
        ++added;
      }
    }
  }
  return out;
}

std::vector<SweepPoint> sweep_top_features(const FeatureMatrix &labeled,
                                           ClassifierKind kind, int max_k,
                                           int repeats, std::uint64_t seed,
                                           const ClassifierParams &params) {
  if (max_k < 1)
    throw Error("sweep: max_k must be >= 1");
  const auto ranking = anova_ranking(labeled);
  const auto y = labeled.binary_labels();
  std::vector<SweepPoint> out;
  const int top = std::min<int>(max_k, static_cast<int>(ranking.size()));
  for (int k = 1; k <= top; ++k) {
    SweepPoint pt;
    pt.k = k;
    pt.features.assign(ranking.begin(), ranking.begin() + k);
    const FeatureMatrix sub = labeled.select_columns(pt.features);
    const CVResult cv = cross_validate(kind, sub.values, y, 5, repeats, seed, params);
    for (const auto &f : cv.folds)
      pt.f1.push_back(f.metrics.f1);
    pt.mean = cv.mean_f1;
    pt.median = quantile(pt.f1, 0.5);
    pt.q1 = quantile(pt.f1, 0.25);
    pt.q3 = quantile(pt.f1, 0.75);
    out.push_back(std::move(pt));
  }
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json AnalysisReport::to_json() const {
  nlohmann::json j;
  j["core_features"] = core_features;
  j["tau_features"] = tau_features;
  auto &grid = j["tau"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < tau.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < tau.cols(); ++c)
      row.push_back(tau(r, c));
    grid.push_back(row);
  }
  auto &drops = j["dropped_features"] = nlohmann::json::array();
  for (const auto &d : dropped)
    drops.push_back({{"feature", d.dropped}, {"partner", d.partner}, {"tau", d.tau}});
  j["reduced_features"] = reduced_features;
  auto &scores = j["scores"] = nlohmann::json::array();
  for (std::size_t i = 0; i < score_features.size(); ++i)
    scores.push_back({{"feature", score_features[i]},
                      {"anova_f", finite_or_null(anova_f[i])},
                      {"anova_f_degenerate", static_cast<bool>(anova_degenerate[i])},
                      {"anova_f_normalized", anova_f_normalized[i]},
                      {"mutual_info", mutual_info[i]},
                      {"mutual_info_normalized", mutual_info_normalized[i]}});
  j["selected_features"] = selected_features;
  j["warnings"] = warnings;
  return j;
}

AnalysisReport AnalysisReport::from_json(const nlohmann::json &j) {
  AnalysisReport r;
  try {
    r.core_features = j.at("core_features").get<std::vector<std::string>>();
    r.tau_features = j.at("tau_features").get<std::vector<std::string>>();
    const auto &grid = j.at("tau");
    r.tau.resize(static_cast<Eigen::Index>(grid.size()),
                 static_cast<Eigen::Index>(grid.size()));
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (std::size_t b = 0; b < grid[a].size(); ++b)
        r.tau(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            grid[a][b].get<double>();
    for (const auto &d : j.at("dropped_features"))
      r.dropped.push_back({d.at("feature").get<std::string>(),
                           d.at("partner").get<std::string>(),
                           d.at("tau").get<double>()});
    r.reduced_features = j.at("reduced_features").get<std::vector<std::string>>();
    for (const auto &s : j.at("scores")) {
      r.score_features.push_back(s.at("feature").get<std::string>());
      r.anova_f.push_back(s.at("anova_f").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : s.at("anova_f").get<double>());
      r.anova_degenerate.push_back(s.at("anova_f_degenerate").get<bool>());
      r.anova_f_normalized.push_back(s.at("anova_f_normalized").get<double>());
      r.mutual_info.push_back(s.at("mutual_info").get<double>());
      r.mutual_info_normalized.push_back(s.at("mutual_info_normalized").get<double>());
    }
    r.selected_features = j.at("selected_features").get<std::vector<std::string>>();
    if (j.contains("warnings"))
      r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed analysis report: ") + e.what());
  }
  return r;
}

AnalysisReport analyze(const FeatureMatrix &core, const AnalysisOptions &opts) {
  AnalysisReport rep;
  rep.core_features = core.feature_names;
  PruneResult pr = correlation_prune(core, opts.tau_threshold);
  rep.tau_features = pr.tau_features;
  rep.tau = pr.tau;
  rep.dropped = pr.drops;
  rep.reduced_features = pr.matrix.feature_names;

  const FeatureMatrix labeled = pr.matrix.labeled_rows();
  const FeatureMatrix numeric = labeled.select_columns(numeric_columns(labeled));
  const auto y = numeric.binary_labels();
  rep.score_features = numeric.feature_names;
  const Scores f = anova_f_scores(numeric.values, y);
  const Scores mi = mutual_info_scores(numeric.values, y, opts.mi_k, opts.seed);
  rep.anova_f = f.values;
  rep.anova_degenerate = f.degenerate;
  rep.anova_f_normalized = normalize_scores(f.values);
  rep.mutual_info = mi.values;
  rep.mutual_info_normalized = normalize_scores(mi.values);

  std::vector<std::string> extras;
  for (const auto &e : opts.mi_extras) {
    if (labeled.column(e))
      extras.push_back(e);
    else
      rep.warnings.push_back("MI extra '" + e + "' is not in the reduced features");
  }
  rep.selected_features = select_top_features(labeled, opts.n_anova, extras,
                                              opts.n_mi_auto, opts.mi_k, opts.seed);
  return rep;
}

} // namespace reprofeat
