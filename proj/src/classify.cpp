#include "reprofeat/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace reprofeat {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t uniform_index(std::mt19937_64 &rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

void check_training_data(const Eigen::MatrixXd &X, const std::vector<int> &y) {
  if (X.cols() == 0)
    throw Error("cannot fit a classifier on zero features");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw Error("X has " + std::to_string(X.rows()) + " rows but y has " +
                std::to_string(y.size()) + " labels");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v != 0 && v != 1)
      throw Error("labels must be 0 or 1");
    (v == 1 ? pos : neg) = true;
  }
  if (!pos || !neg)
    throw Error("training labels contain a single class");
  if (!X.allFinite())
    throw Error("training data contains non-finite values");
}

// ---------------------------------------------------------------------------
// CART with Gini impurity, sample weights and optional feature subsampling.

struct Tree {
  struct Node {
    int feature = -1;
    double threshold = 0;
    int left = -1, right = -1;
    double p_pos = 0;
  };
  std::vector<Node> nodes;

  double prob(const Eigen::MatrixXd &X, Eigen::Index row) const {
    int at = 0;
    while (nodes[at].feature >= 0)
      at = X(row, nodes[at].feature) <= nodes[at].threshold ? nodes[at].left
                                                            : nodes[at].right;
    return nodes[at].p_pos;
  }
};

class TreeBuilder {
public:
  TreeBuilder(const Eigen::MatrixXd &X, const std::vector<int> &y,
              const std::vector<double> &w, int max_depth, int max_features,
              std::mt19937_64 *rng)
      : X_(X), y_(y), w_(w), max_depth_(max_depth),
        max_features_(max_features), rng_(rng) {}

  Tree build() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
      if (w_[static_cast<std::size_t>(i)] > 0)
        idx.push_back(i);
    grow(idx, 0);
    return std::move(tree_);
  }

private:
  static double gini(double pos, double total) {
    if (total <= 0)
      return 0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
  }

  int grow(std::vector<Eigen::Index> &idx, int depth) {
    double total = 0, pos = 0;
    for (auto i : idx) {
      const double w = w_[static_cast<std::size_t>(i)];
      total += w;
      pos += y_[static_cast<std::size_t>(i)] == 1 ? w : 0;
    }
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].p_pos = total > 0 ? pos / total : 0.5;

    const bool pure = pos <= 0 || pos >= total;
    if (pure || idx.size() < 2 || (max_depth_ >= 0 && depth >= max_depth_))
      return id;

    std::vector<Eigen::Index> features(static_cast<std::size_t>(X_.cols()));
    std::iota(features.begin(), features.end(), 0);
    if (max_features_ > 0 && max_features_ < X_.cols()) {
      for (int k = 0; k < max_features_; ++k)
        std::swap(features[static_cast<std::size_t>(k)],
                  features[k + uniform_index(*rng_, features.size() -
                                                        static_cast<std::size_t>(k))]);
      features.resize(static_cast<std::size_t>(max_features_));
      std::sort(features.begin(), features.end());
    }

    const double parent = gini(pos, total) * total;
    double best_gain = 1e-12;
    Eigen::Index best_feature = -1;
    double best_threshold = 0;
    std::vector<Eigen::Index> order = idx;
    for (Eigen::Index f : features) {
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return X_(a, f) < X_(b, f);
                       });
      double lw = 0, lp = 0;
      for (std::size_t s = 0; s + 1 < order.size(); ++s) {
        const double w = w_[static_cast<std::size_t>(order[s])];
        lw += w;
        lp += y_[static_cast<std::size_t>(order[s])] == 1 ? w : 0;
        const double a = X_(order[s], f), b = X_(order[s + 1], f);
        if (a == b)
          continue;
        const double gain =
            parent - gini(lp, lw) * lw - gini(pos - lp, total - lw) * (total - lw);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          double mid = a + (b - a) / 2.0;
          best_threshold = mid < b ? mid : a;
        }
      }
    }
    if (best_feature < 0)
      return id;

    std::vector<Eigen::Index> left, right;
    for (auto i : idx)
      (X_(i, best_feature) <= best_threshold ? left : right).push_back(i);
    tree_.nodes[id].feature = static_cast<int>(best_feature);
    tree_.nodes[id].threshold = best_threshold;
    const int l = grow(left, depth + 1);
    tree_.nodes[id].left = l;
    const int r = grow(right, depth + 1);
    tree_.nodes[id].right = r;
    return id;
  }

  const Eigen::MatrixXd &X_;
  const std::vector<int> &y_;
  const std::vector<double> &w_;
  int max_depth_;
  int max_features_;
  std::mt19937_64 *rng_;
  Tree tree_;
};

// ---------------------------------------------------------------------------

class LogRegModel : public Model {
public:
  LogRegModel(const Eigen::MatrixXd &X, const std::vector<int> &y,
              const ClassifierParams &p)
      : Model(ClassifierKind::logreg) {
    const auto n = X.rows();
    mean_ = X.colwise().mean().transpose();
    scale_ = ((X.rowwise() - mean_.transpose()).array().square().colwise().sum() /
              static_cast<double>(n))
                 .sqrt()
                 .transpose();
    for (Eigen::Index j = 0; j < scale_.size(); ++j)
      if (scale_(j) < 1e-12)
        scale_(j) = 1.0;
    const Eigen::MatrixXd Z = standardize(X);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
      s(i) = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

    const double lambda = p.logreg_lambda;
    auto loss = [&](const Eigen::VectorXd &w, double b) {
      const Eigen::ArrayXd m = s.array() * ((Z * w).array() + b);
      double total = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        total += m(i) > 0 ? std::log1p(std::exp(-m(i)))
                          : -m(i) + std::log1p(std::exp(m(i)));
      return total / static_cast<double>(n) + 0.5 * lambda * w.squaredNorm();
    };

    w_ = Eigen::VectorXd::Zero(X.cols());
    b_ = 0;
    double step = 1.0;
    double f = loss(w_, b_);
    for (int it = 0; it < p.logreg_max_iter; ++it) {
      const Eigen::ArrayXd m = s.array() * ((Z * w_).array() + b_);
      // d/dz log(1 + e^{-s z}) = -s * sigmoid(-m)
      Eigen::VectorXd coef(n);
      for (Eigen::Index i = 0; i < n; ++i)
        coef(i) = -s(i) / (1.0 + std::exp(m(i)));
      const Eigen::VectorXd gw =
          Z.transpose() * coef / static_cast<double>(n) + lambda * w_;
      const double gb = coef.sum() / static_cast<double>(n);
      const double gnorm2 = gw.squaredNorm() + gb * gb;
      if (std::max(gw.cwiseAbs().maxCoeff(), std::abs(gb)) < p.logreg_tol)
        break;
      step = std::min(step * 2.0, 1e6);
      while (true) {
        const Eigen::VectorXd w_new = w_ - step * gw;
        const double b_new = b_ - step * gb;
        const double f_new = loss(w_new, b_new);
        if (f_new <= f - 0.5 * step * gnorm2 || step < 1e-12) {
          w_ = w_new;
          b_ = b_new;
          f = f_new;
          break;
        }
        step *= 0.5;
      }
    }
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const override {
    const Eigen::VectorXd z = standardize(X) * w_;
    std::vector<int> out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out[static_cast<std::size_t>(i)] = z(i) + b_ >= 0 ? 1 : 0;
    return out;
  }

private:
  Eigen::MatrixXd standardize(const Eigen::MatrixXd &X) const {
    return (X.rowwise() - mean_.transpose()).array().rowwise() /
           scale_.transpose().array();
  }
  Eigen::VectorXd mean_, scale_, w_;
  double b_ = 0;
};

class KnnModel : public Model {
public:
  KnnModel(const Eigen::MatrixXd &X, const std::vector<int> &y, int k)
      : Model(ClassifierKind::knn), X_(X), y_(y), k_(k) {
    if (k < 1)
      throw Error("knn requires k >= 1");
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &Q) const override {
    const auto n = static_cast<std::size_t>(X_.rows());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
    std::vector<int> out;
    std::vector<std::pair<double, std::size_t>> d(n);
    for (Eigen::Index q = 0; q < Q.rows(); ++q) {
      for (std::size_t i = 0; i < n; ++i)
        d[i] = {(X_.row(static_cast<Eigen::Index>(i)) - Q.row(q)).squaredNorm(),
                i};
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k),
                        d.end());
      std::size_t pos = 0;
      for (std::size_t i = 0; i < k; ++i)
        pos += static_cast<std::size_t>(y_[d[i].second]);
      out.push_back(2 * pos >= k ? 1 : 0);
    }
    return out;
  }

private:
  Eigen::MatrixXd X_;
  std::vector<int> y_;
  int k_;
};

class TreeModel : public Model {
public:
  TreeModel(const Eigen::MatrixXd &X, const std::vector<int> &y, int max_depth)
      : Model(ClassifierKind::dtree) {
    const std::vector<double> w(y.size(), 1.0);
    tree_ = TreeBuilder(X, y, w, max_depth, 0, nullptr).build();
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const override {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out.push_back(tree_.prob(X, i) >= 0.5 ? 1 : 0);
    return out;
  }

private:
  Tree tree_;
};

class ForestModel : public Model {
public:
  ForestModel(const Eigen::MatrixXd &X, const std::vector<int> &y,
              const ClassifierParams &p)
      : Model(ClassifierKind::rforest) {
    std::mt19937_64 rng(p.seed);
    const auto n = y.size();
    const int max_features = std::max(
        1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(X.cols())))));
    for (int t = 0; t < p.rforest_trees; ++t) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        w[uniform_index(rng, n)] += 1.0;
      trees_.push_back(
          TreeBuilder(X, y, w, p.rforest_max_depth, max_features, &rng).build());
    }
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const override {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double sum = 0;
      for (const auto &t : trees_)
        sum += t.prob(X, i);
      out.push_back(sum / static_cast<double>(trees_.size()) >= 0.5 ? 1 : 0);
    }
    return out;
  }

private:
  std::vector<Tree> trees_;
};

class AdaBoostModel : public Model {
public:
  AdaBoostModel(const Eigen::MatrixXd &X, const std::vector<int> &y,
                const ClassifierParams &p)
      : Model(ClassifierKind::adaboost) {
    const auto n = y.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    for (int round = 0; round < p.adaboost_rounds; ++round) {
      Tree stump = TreeBuilder(X, y, w, 1, 0, nullptr).build();
      double err = 0, total = 0;
      std::vector<bool> miss(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int pred =
            stump.prob(X, static_cast<Eigen::Index>(i)) >= 0.5 ? 1 : 0;
        miss[i] = pred != y[i];
        err += miss[i] ? w[i] : 0;
        total += w[i];
      }
      err /= total;
      if (err <= 0) {
        stumps_.push_back(std::move(stump));
        alphas_.push_back(1.0);
        break;
      }
      if (err >= 0.5) {
        if (stumps_.empty()) {
          stumps_.push_back(std::move(stump));
          alphas_.push_back(1.0);
        }
        break;
      }
      const double alpha = std::log((1.0 - err) / err);
      stumps_.push_back(std::move(stump));
      alphas_.push_back(alpha);
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (miss[i])
          w[i] *= std::exp(alpha);
        sum += w[i];
      }
      for (auto &v : w)
        v /= sum;
    }
  }

  std::vector<int> predict_rounds(const Eigen::MatrixXd &X,
                                  std::size_t rounds) const {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double score = 0;
      for (std::size_t t = 0; t < std::min(rounds, stumps_.size()); ++t)
        score += alphas_[t] * (stumps_[t].prob(X, i) >= 0.5 ? 1.0 : -1.0);
      out.push_back(score >= 0 ? 1 : 0);
    }
    return out;
  }
  std::size_t rounds() const { return stumps_.size(); }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const override {
    return predict_rounds(X, stumps_.size());
  }

private:
  std::vector<Tree> stumps_;
  std::vector<double> alphas_;
};

class GaussNbModel : public Model {
public:
  GaussNbModel(const Eigen::MatrixXd &X, const std::vector<int> &y,
               double var_floor)
      : Model(ClassifierKind::gauss_nb) {
    for (int c = 0; c < 2; ++c) {
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == c)
          rows.push_back(static_cast<Eigen::Index>(i));
      const Eigen::MatrixXd Xc = X(rows, Eigen::all);
      mean_[c] = Xc.colwise().mean().transpose();
      var_[c] = ((Xc.rowwise() - mean_[c].transpose()).array().square().colwise().sum() /
                 static_cast<double>(rows.size()))
                    .transpose()
                    .max(var_floor);
      log_prior_[c] = std::log(static_cast<double>(rows.size()) /
                               static_cast<double>(y.size()));
    }
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const override {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double lp[2];
      for (int c = 0; c < 2; ++c) {
        const Eigen::ArrayXd diff = X.row(i).transpose() - mean_[c];
        lp[c] = log_prior_[c] -
                0.5 * ((2.0 * kPi * var_[c]).log() + diff.square() / var_[c]).sum();
      }
      out.push_back(lp[1] >= lp[0] ? 1 : 0);
    }
    return out;
  }

private:
  Eigen::VectorXd mean_[2];
  Eigen::ArrayXd var_[2];
  double log_prior_[2] = {0, 0};
};

class QdaModel : public Model {
public:
  QdaModel(const Eigen::MatrixXd &X, const std::vector<int> &y, double reg)
      : Model(ClassifierKind::qda) {
    const auto d = X.cols();
    for (int c = 0; c < 2; ++c) {
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == c)
          rows.push_back(static_cast<Eigen::Index>(i));
      const Eigen::MatrixXd Xc = X(rows, Eigen::all);
      mean_[c] = Xc.colwise().mean().transpose();
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      if (rows.size() > 1) {
        const Eigen::MatrixXd centered = Xc.rowwise() - mean_[c].transpose();
        cov = centered.transpose() * centered /
              static_cast<double>(rows.size() - 1);
      }
      double r = reg;
      for (int attempt = 0;; ++attempt) {
        chol_[c].compute(cov + r * Eigen::MatrixXd::Identity(d, d));
        if (chol_[c].info() == Eigen::Success)
          break;
        if (attempt == 12)
          throw Error("qda: class covariance is not positive definite");
        r *= 10;
      }
      const Eigen::MatrixXd L = chol_[c].matrixL();
      log_det_[c] = 2.0 * L.diagonal().array().log().sum();
      log_prior_[c] = std::log(static_cast<double>(rows.size()) /
                               static_cast<double>(y.size()));
    }
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &X) const override {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double score[2];
      for (int c = 0; c < 2; ++c) {
        const Eigen::VectorXd diff = X.row(i).transpose() - mean_[c];
        const Eigen::VectorXd z = chol_[c].matrixL().solve(diff);
        score[c] = log_prior_[c] - 0.5 * log_det_[c] - 0.5 * z.squaredNorm();
      }
      out.push_back(score[1] >= score[0] ? 1 : 0);
    }
    return out;
  }

private:
  Eigen::VectorXd mean_[2];
  Eigen::LLT<Eigen::MatrixXd> chol_[2];
  double log_det_[2] = {0, 0};
  double log_prior_[2] = {0, 0};
};

// Two-variable SMO with second-order working set selection.
class SvmModel : public Model {
public:
  SvmModel(const Eigen::MatrixXd &X, const std::vector<int> &y,
           const ClassifierParams &p)
      : Model(ClassifierKind::svm_rbf), X_(X) {
    const auto n = X.rows();
    if (p.svm_gamma) {
      gamma_ = *p.svm_gamma;
    } else {
      const double mean = X.mean();
      const double var = (X.array() - mean).square().mean();
      gamma_ = var > 0 ? 1.0 / (static_cast<double>(X.cols()) * var) : 1.0;
    }
    c_ = p.svm_c;
    y_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
      y_(i) = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        K(i, j) = K(j, i) = kernel(X.row(i), X.row(j));

    constexpr double tau = 1e-12;
    alpha_ = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);
    auto upper = [&](Eigen::Index t) { return alpha_(t) >= c_; };
    auto lower = [&](Eigen::Index t) { return alpha_(t) <= 0; };

    for (iterations_ = 0; iterations_ < p.svm_max_iter; ++iterations_) {
      double gmax = -std::numeric_limits<double>::infinity();
      double gmax2 = -std::numeric_limits<double>::infinity();
      Eigen::Index i = -1, j = -1;
      for (Eigen::Index t = 0; t < n; ++t) {
        if (y_(t) > 0 ? !upper(t) : !lower(t)) {
          const double v = -y_(t) * G(t);
          if (v >= gmax) {
            gmax = v;
            i = t;
          }
        }
      }
      double obj_min = std::numeric_limits<double>::infinity();
      for (Eigen::Index t = 0; t < n && i >= 0; ++t) {
        if (y_(t) > 0 ? lower(t) : upper(t))
          continue;
        const double v = y_(t) * G(t);
        gmax2 = std::max(gmax2, v);
        const double grad_diff = gmax + v;
        if (grad_diff > 0) {
          double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
          if (quad <= 0)
            quad = tau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = t;
          }
        }
      }
      kkt_ = gmax + gmax2;
      if (i < 0 || j < 0 || kkt_ < p.svm_tol)
        break;

      const double old_i = alpha_(i), old_j = alpha_(j);
      if (y_(i) != y_(j)) {
        double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (quad <= 0)
          quad = tau;
        const double delta = (-G(i) - G(j)) / quad;
        const double diff = alpha_(i) - alpha_(j);
        alpha_(i) += delta;
        alpha_(j) += delta;
        if (diff > 0) {
          if (alpha_(j) < 0) {
            alpha_(j) = 0;
            alpha_(i) = diff;
          }
        } else if (alpha_(i) < 0) {
          alpha_(i) = 0;
          alpha_(j) = -diff;
        }
        if (diff > 0) {
          if (alpha_(i) > c_) {
            alpha_(i) = c_;
            alpha_(j) = c_ - diff;
          }
        } else if (alpha_(j) > c_) {
          alpha_(j) = c_;
          alpha_(i) = c_ + diff;
        }
      } else {
        double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (quad <= 0)
          quad = tau;
        const double delta = (G(i) - G(j)) / quad;
        const double sum = alpha_(i) + alpha_(j);
        alpha_(i) -= delta;
        alpha_(j) += delta;
        if (sum > c_) {
          if (alpha_(i) > c_) {
            alpha_(i) = c_;
            alpha_(j) = sum - c_;
          }
        } else if (alpha_(j) < 0) {
          alpha_(j) = 0;
          alpha_(i) = sum;
        }
        if (sum > c_) {
          if (alpha_(j) > c_) {
            alpha_(j) = c_;
            alpha_(i) = sum - c_;
          }
        } else if (alpha_(i) < 0) {
          alpha_(i) = 0;
          alpha_(j) = sum;
        }
      }
      const double di = alpha_(i) - old_i, dj = alpha_(j) - old_j;
      for (Eigen::Index t = 0; t < n; ++t)
        G(t) += y_(t) * (y_(i) * K(i, t) * di + y_(j) * K(j, t) * dj);
    }

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double yg = y_(t) * G(t);
      if (upper(t)) {
        if (y_(t) < 0)
          ub = std::min(ub, yg);
        else
          lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (y_(t) > 0)
          ub = std::min(ub, yg);
        else
          lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    rho_ = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  }

  SvmDiagnostics diagnostics() const {
    return {alpha_, c_, rho_, gamma_, kkt_, iterations_};
  }

protected:
  std::vector<int> predict_canonical(const Eigen::MatrixXd &Q) const override {
    std::vector<int> out;
    for (Eigen::Index q = 0; q < Q.rows(); ++q) {
      double f = -rho_;
      for (Eigen::Index i = 0; i < X_.rows(); ++i)
        if (alpha_(i) > 0)
          f += alpha_(i) * y_(i) * kernel(X_.row(i), Q.row(q));
      out.push_back(f >= 0 ? 1 : 0);
    }
    return out;
  }

private:
  double kernel(const Eigen::Ref<const Eigen::RowVectorXd> &a,
                const Eigen::Ref<const Eigen::RowVectorXd> &b) const {
    return std::exp(-gamma_ * (a - b).squaredNorm());
  }

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_, alpha_;
  double gamma_ = 1, c_ = 1, rho_ = 0, kkt_ = 0;
  long long iterations_ = 0;
};

} // namespace

// ---------------------------------------------------------------------------

std::string to_string(ClassifierKind k) {
  switch (k) {
  case ClassifierKind::logreg:
    return "logreg";
  case ClassifierKind::knn:
    return "knn";
  case ClassifierKind::dtree:
    return "dtree";
  case ClassifierKind::rforest:
    return "rforest";
  case ClassifierKind::adaboost:
    return "adaboost";
  case ClassifierKind::gauss_nb:
    return "gauss_nb";
  case ClassifierKind::qda:
    return "qda";
  case ClassifierKind::svm_rbf:
    return "svm_rbf";
  }
  return "unknown";
}

const std::vector<ClassifierKind> &all_classifiers() {
  static const std::vector<ClassifierKind> all = {
      ClassifierKind::logreg,   ClassifierKind::knn,
      ClassifierKind::dtree,    ClassifierKind::rforest,
      ClassifierKind::adaboost, ClassifierKind::gauss_nb,
      ClassifierKind::qda,      ClassifierKind::svm_rbf};
  return all;
}

ClassifierKind classifier_from_string(std::string_view id) {
  for (auto k : all_classifiers())
    if (to_string(k) == id)
      return k;
  throw Error("unknown classifier: " + std::string(id));
}

std::vector<int> Model::predict(const Eigen::MatrixXd &X) const {
  if (static_cast<std::size_t>(X.cols()) != order_.size())
    throw Error("model expects " + std::to_string(order_.size()) +
                " features, got " + std::to_string(X.cols()));
  return predict_canonical(X(Eigen::all, order_));
}

std::unique_ptr<Model> fit(ClassifierKind kind, const Eigen::MatrixXd &X,
                           const std::vector<int> &y,
                           const ClassifierParams &params) {
  check_training_data(X, y);

  // Sort columns by their training values so column order cannot matter.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     for (Eigen::Index i = 0; i < X.rows(); ++i)
                       if (X(i, a) != X(i, b))
                         return X(i, a) < X(i, b);
                     return false;
                   });
  const Eigen::MatrixXd Xc = X(Eigen::all, order);

  std::unique_ptr<Model> m;
  switch (kind) {
  case ClassifierKind::logreg:
    m = std::make_unique<LogRegModel>(Xc, y, params);
    break;
  case ClassifierKind::knn:
    m = std::make_unique<KnnModel>(Xc, y, params.knn_k);
    break;
  case ClassifierKind::dtree:
    m = std::make_unique<TreeModel>(Xc, y, params.dtree_max_depth);
    break;
  case ClassifierKind::rforest:
    m = std::make_unique<ForestModel>(Xc, y, params);
    break;
  case ClassifierKind::adaboost:
    m = std::make_unique<AdaBoostModel>(Xc, y, params);
    break;
  case ClassifierKind::gauss_nb:
    m = std::make_unique<GaussNbModel>(Xc, y, params.nb_var_floor);
    break;
  case ClassifierKind::qda:
    m = std::make_unique<QdaModel>(Xc, y, params.qda_reg);
    break;
  case ClassifierKind::svm_rbf:
    m = std::make_unique<SvmModel>(Xc, y, params);
    break;
  }
  m->order_ = std::move(order);
  return m;
}

SvmDiagnostics svm_diagnostics(const Model &m) {
  const auto *svm = dynamic_cast<const SvmModel *>(&m);
  if (!svm)
    throw Error("svm_diagnostics requires an svm_rbf model");
  return svm->diagnostics();
}

std::vector<double> adaboost_staged_errors(const Model &m,
                                           const Eigen::MatrixXd &X,
                                           const std::vector<int> &y) {
  const auto *ab = dynamic_cast<const AdaBoostModel *>(&m);
  if (!ab)
    throw Error("adaboost_staged_errors requires an adaboost model");
  const Eigen::MatrixXd Xc = X(Eigen::all, m.column_order());
  std::vector<double> errors;
  for (std::size_t r = 1; r <= ab->rounds(); ++r) {
    const auto pred = ab->predict_rounds(Xc, r);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      wrong += pred[i] != y[i] ? 1 : 0;
    errors.push_back(static_cast<double>(wrong) / static_cast<double>(y.size()));
  }
  return errors;
}

Metrics compute_metrics(const std::vector<int> &y_true,
                        const std::vector<int> &y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error("metric inputs differ in length");
  Metrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i] == 1)
      (y_true[i] == 1 ? m.tp : m.fp)++;
    else
      (y_true[i] == 1 ? m.fn : m.tn)++;
  }
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0;
  m.f1 = m.precision + m.recall > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0;
  return m;
}

std::vector<int> stratified_kfold(const std::vector<int> &y, int k,
                                  std::uint64_t seed) {
  if (k < 2)
    throw Error("stratified_kfold requires k >= 2");
  std::mt19937_64 rng(seed);
  std::vector<int> fold(y.size(), -1);
  std::size_t offset = 0;
  for (int c : {1, 0}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c)
        rows.push_back(i);
    if (rows.size() < static_cast<std::size_t>(k))
      throw Error("class " + std::to_string(c) + " has " +
                  std::to_string(rows.size()) + " members, fewer than k = " +
                  std::to_string(k));
    for (std::size_t i = rows.size(); i > 1; --i)
      std::swap(rows[i - 1], rows[uniform_index(rng, i)]);
    for (std::size_t p = 0; p < rows.size(); ++p)
      fold[rows[p]] = static_cast<int>((offset + p) % static_cast<std::size_t>(k));
    offset += rows.size();
  }
  for (std::size_t i = 0; i < y.size(); ++i)
    if (fold[i] < 0)
      throw Error("labels must be 0 or 1");
  return fold;
}

nlohmann::json CVResult::to_json() const {
  nlohmann::json j;
  j["classifier"] = to_string(kind);
  j["k"] = k;
  j["repeats"] = repeats;
  j["seed"] = seed;
  j["mean_precision"] = mean_precision;
  j["mean_recall"] = mean_recall;
  j["mean_f1"] = mean_f1;
  auto &folds_j = j["folds"] = nlohmann::json::array();
  for (const auto &f : folds)
    folds_j.push_back({{"repeat", f.repeat},
                       {"fold", f.fold},
                       {"precision", f.metrics.precision},
                       {"recall", f.metrics.recall},
                       {"f1", f.metrics.f1},
                       {"tp", f.metrics.tp},
                       {"fp", f.metrics.fp},
                       {"fn", f.metrics.fn},
                       {"tn", f.metrics.tn}});
  j["assignments"] = assignments;
  return j;
}

CVResult cross_validate(ClassifierKind kind, const Eigen::MatrixXd &X,
                        const std::vector<int> &y, int k, int repeats,
                        std::uint64_t seed, ClassifierParams params) {
  if (repeats < 1)
    throw Error("repeats must be >= 1");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw Error("X and y differ in length");
  CVResult res;
  res.kind = kind;
  res.k = k;
  res.repeats = repeats;
  res.seed = seed;
  for (int r = 0; r < repeats; ++r) {
    const auto folds = stratified_kfold(y, k, seed + static_cast<std::uint64_t>(r));
    res.assignments.push_back(folds);
    for (int f = 0; f < k; ++f) {
      std::vector<Eigen::Index> train, test;
      std::vector<int> y_train, y_test;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (folds[i] == f) {
          test.push_back(static_cast<Eigen::Index>(i));
          y_test.push_back(y[i]);
        } else {
          train.push_back(static_cast<Eigen::Index>(i));
          y_train.push_back(y[i]);
        }
      }
      params.seed = seed + static_cast<std::uint64_t>(r * k + f);
      const auto model = fit(kind, X(train, Eigen::all), y_train, params);
      const auto pred = model->predict(X(test, Eigen::all));
      res.folds.push_back({r, f, compute_metrics(y_test, pred)});
    }
  }
  for (const auto &f : res.folds) {
    res.mean_precision += f.metrics.precision;
    res.mean_recall += f.metrics.recall;
    res.mean_f1 += f.metrics.f1;
  }
  const double n = static_cast<double>(res.folds.size());
  res.mean_precision /= n;
  res.mean_recall /= n;
  res.mean_f1 /= n;
  return res;
}

} // namespace reprofeat
