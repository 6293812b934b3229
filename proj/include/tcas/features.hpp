#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcas/ingest.hpp"
#include "tcas/types.hpp"

namespace tcas::features {

/// Feature order is part of the file format; never reorder.
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "swipe_duration", "start_x", "start_y", "end_x",     "end_y",     "dp",
    "l",              "velocity", "initial_v", "final_v", "mean_v",  "direction",
    "area",           "acceleration", "mean_a", "initial_a", "final_a", "aP25",
    "aP50",           "aP75",     "vP25",    "vP50",     "vP75",      "speed",
    "initial_s",      "final_s",  "sP25",    "sP50",     "sP75",      "mean_v_x",
    "mean_v_y",       "mean_a_x", "mean_a_y", "mean_d",  "max_d",     "vxP25",
    "vxP50",          "vxP75",    "vyP25",   "vyP50",    "vyP75",     "axP25",
    "axP50",          "axP75",    "ayP25",   "ayP50",    "ayP75"};

/// Index of a feature by name; throws ConfigError for unknown names.
int feature_index(std::string_view name);

enum class Chord { sloped, vertical, degenerate };

/// Pairwise kinematics of one swipe. Velocities have n-1 entries,
/// accelerations n-2, deviations n.
struct Kinematics {
  Vector vx, vy;  // px/ms
  Vector ax, ay;  // px/ms^2
  Vector speed;   // |v|, px/ms
  Vector dev;     // distance of each point from the start-end chord, px
  Chord chord = Chord::sloped;
  double slope = 0;      // y = slope*x + intercept, valid for Chord::sloped
  double intercept = 0;
};

/// Throws DegenerateSwipe when every point coincides or fewer than 3 events.
Kinematics kinematics(const ingest::Swipe& swipe);

struct FeatureVector {
  std::string user;
  Device device = Device::phone;
  int id = -1;  // swipe_id, or window_id for window samples
  FeatureRow values = FeatureRow::Zero();

  double operator[](std::string_view name) const { return values(feature_index(name)); }
};

/// Number of leading/trailing entries averaged for initial_* and final_*
/// features over a sequence of `len` pairwise entries (5%, at least two).
std::size_t edge_window(std::size_t len);

/// m-th percentile with linear interpolation between order statistics.
template <typename Derived>
double percentile(const Eigen::DenseBase<Derived>& values, double m) {
  std::vector<double> v(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    v[static_cast<std::size_t>(i)] = values.derived().coeff(i);
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0.0;
  const double pos = m / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

FeatureVector extract_features(const ingest::Swipe& swipe);

/// Per-user feature vectors, ordered by id.
using FeatureSet = std::map<std::string, std::vector<FeatureVector>>;

struct ExtractionReport {
  std::size_t extracted = 0;
  std::size_t degenerate = 0;
};

FeatureSet extract_all(const ingest::Dataset& ds, ExtractionReport* report = nullptr);

/// Z-score record fitted on training rows only. Columns whose spread is zero
/// pass through unchanged and are flagged.
struct Standardizer {
  RowVector mean;
  RowVector stddev;
  std::vector<bool> constant;

  template <typename Derived>
  static Standardizer fit(const Eigen::MatrixBase<Derived>& X) {
    Standardizer s;
    const auto n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean();
    s.stddev.resize(X.cols());
    s.constant.assign(static_cast<std::size_t>(X.cols()), false);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double var = (X.col(j).array() - s.mean(j)).square().sum() / n;
      s.stddev(j) = std::sqrt(var);
      if (!(s.stddev(j) > 1e-12 * std::max(1.0, std::abs(s.mean(j)))))
        s.constant[static_cast<std::size_t>(j)] = true;
    }
    return s;
  }

  template <typename Derived>
  Matrix transform(const Eigen::MatrixBase<Derived>& X) const {
    Matrix out = X;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (!constant[static_cast<std::size_t>(j)])
        out.col(j) = (out.col(j).array() - mean(j)) / stddev(j);
    return out;
  }

  template <typename Derived>
  Matrix inverse(const Eigen::MatrixBase<Derived>& Z) const {
    Matrix out = Z;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (!constant[static_cast<std::size_t>(j)])
        out.col(j) = out.col(j).array() * stddev(j) + mean(j);
    return out;
  }

  bool empty() const { return mean.size() == 0; }
};

/// Fits on `train` and applies to `apply_to`.
std::pair<Matrix, Standardizer> standardize(const Matrix& train, const Matrix& apply_to);

Matrix stack(const std::vector<FeatureVector>& rows);

/// Extra string columns appended after the 47 features (label, scenario, ...).
using ExtraColumns = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// `user_id,device,<id_column>,<47 names>[,extras]`, 17 significant digits.
void write_feature_csv(std::ostream& out, const std::vector<FeatureVector>& rows,
                       std::string_view id_column = "swipe_id",
                       const ExtraColumns& extra = {});
void write_feature_csv(std::ostream& out, const FeatureSet& set,
                       std::string_view id_column = "swipe_id");

struct FeatureFile {
  std::string id_column;
  std::vector<FeatureVector> rows;
  std::map<std::string, std::vector<std::string>> extra;

  FeatureSet by_user() const;
};

FeatureFile read_feature_csv(std::istream& in);

}  // namespace tcas::features
