#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reprofeat/features.hpp"

namespace testsupport {

inline std::filesystem::path fixture_dir() { return REPROFEAT_TEST_FIXTURES; }

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty())
      out.push_back(line);
  return out;
}

class TempDir {
public:
  explicit TempDir(const std::string &tag = "reprofeat") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &rel) const {
    return path_ / rel;
  }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path &p, const std::string &text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

struct Dataset {
  Eigen::MatrixXd X;
  std::vector<int> y;
};

// Two Gaussian classes along an oblique direction; points closer than 0.5
// to the separating hyperplane are rejected, so the gap is at least 1.
inline Dataset separable(int n, std::uint64_t seed, int d = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
  u(0) = 1;
  if (d > 1)
    u(1) = 1;
  u.normalize();
  Dataset ds;
  ds.X.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    Eigen::VectorXd x(d);
    do {
      for (int j = 0; j < d; ++j)
        x(j) = g(rng);
      x += (label ? 1.5 : -1.5) * u;
    } while ((label ? 1 : -1) * x.dot(u) < 0.5);
    ds.X.row(i) = x.transpose();
    ds.y.push_back(label);
  }
  return ds;
}

// Four clusters at the corners of a square, labeled by quadrant parity.
inline Dataset xor_data(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  Dataset ds;
  ds.X.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const int a = i % 2, b = (i / 2) % 2;
    ds.X(i, 0) = (a ? 1.5 : -1.5) + g(rng);
    ds.X(i, 1) = (b ? 1.5 : -1.5) + g(rng);
    ds.y.push_back(a ^ b);
  }
  return ds;
}

inline std::vector<int> permuted(std::vector<int> y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(y.begin(), y.end(), rng);
  return y;
}

// Labeled matrix with `informative` columns shifted by the label and
// `noise` pure-noise columns after them.
inline reprofeat::FeatureMatrix planted_signal(int n, int informative,
                                               int noise, double shift,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int d = informative + noise;
  reprofeat::FeatureMatrix m;
  m.values.resize(n, d);
  m.is_default = reprofeat::MaskMatrix::Constant(n, d, false);
  for (int j = 0; j < d; ++j)
    m.feature_names.push_back((j < informative ? "signal_" : "noise_") +
                              std::to_string(j));
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    m.paper_ids.push_back("r" + std::to_string(i));
    m.labels.push_back(label == 1);
    for (int j = 0; j < d; ++j)
      m.values(i, j) = g(rng) + (j < informative && label ? shift : 0.0);
  }
  return m;
}

// 38 columns over 60 rows with six planted pairs at tau > 0.8.
//
// shared = true: pairs (a1,b1) .. (a4,b4) are disjoint and (a5,b5), (a5,c5)
// share a5, which is masked on half the rows; b5 and c5 copy a5 only on
// a5's real rows. Five drops leave 33 columns.
// shared = false: six disjoint pairs, six drops, 32 columns.
struct PlantedPairs {
  reprofeat::FeatureMatrix matrix;
  std::vector<std::pair<std::string, std::string>> pairs; // (loser, winner)
};

inline PlantedPairs planted_pairs(bool shared, std::uint64_t seed = 7) {
  const int n = 60, d = 38;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  reprofeat::FeatureMatrix m;
  m.values.resize(n, d);
  m.is_default = reprofeat::MaskMatrix::Constant(n, d, false);
  for (int i = 0; i < n; ++i) {
    m.paper_ids.push_back("r" + std::to_string(i));
    m.labels.push_back(i % 2 == 1);
    for (int j = 0; j < d; ++j)
      m.values(i, j) = g(rng);
  }
  for (int j = 0; j < d; ++j)
    m.feature_names.push_back("f" + std::to_string(j));

  PlantedPairs out;
  auto copy_with_noise = [&](int from, int to) {
    for (int i = 0; i < n; ++i)
      m.values(i, to) = m.values(i, from) + 0.05 * g(rng);
  };
  // Disjoint pairs: the later column copies the earlier one and loses
  // 3 + p rows to the mask, so it has fewer real values.
  const int disjoint = shared ? 4 : 6;
  for (int p = 0; p < disjoint; ++p) {
    const int keep = 2 * p, lose = 2 * p + 1;
    copy_with_noise(keep, lose);
    for (int i = 0; i < 3 + p; ++i)
      m.is_default(i * 7 % n, lose) = true;
    out.pairs.push_back({m.feature_names[lose], m.feature_names[keep]});
  }
  if (shared) {
    const int a = 20, b = 21, c = 22;
    for (int i = 0; i < n; ++i) {
      if (i % 2 == 0) {
        m.values(i, b) = m.values(i, a) + 0.05 * g(rng);
        m.values(i, c) = m.values(i, a) + 0.05 * g(rng);
      } else {
        m.is_default(i, a) = true;
      }
    }
    out.pairs.push_back({m.feature_names[a], m.feature_names[b]});
    out.pairs.push_back({m.feature_names[a], m.feature_names[c]});
  }
  out.matrix = std::move(m);
  return out;
}

} // namespace testsupport
