#pragma once

// Fixtures shared by the test binaries. Nothing here calls into the code
// under test except for plain data types.

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tcas/ingest.hpp"
#include "tcas/types.hpp"

namespace tcas::testing {

inline ingest::TouchEvent ev(double x, double y, std::int64_t t, ingest::Action a,
                             double major = 1, double minor = 1) {
  return {x, y, t, major, minor, a};
}

inline ingest::Swipe make_swipe(const std::vector<std::array<double, 3>>& xyt,
                                const std::string& user = "u", int id = 0) {
  ingest::Swipe s;
  s.user = user;
  s.id = id;
  for (std::size_t i = 0; i < xyt.size(); ++i) {
    const auto a = i == 0 ? ingest::Action::down
                          : i + 1 == xyt.size() ? ingest::Action::up : ingest::Action::move;
    s.events.push_back(ev(xyt[i][0], xyt[i][1], static_cast<std::int64_t>(xyt[i][2]), a));
  }
  return s;
}

/// Random jittery swipe with 6..60 events and strictly increasing times.
inline ingest::Swipe random_swipe(std::mt19937_64& rng, const std::string& user = "u", int id = 0) {
  std::uniform_int_distribution<int> len(6, 60), step(1, 40);
  std::uniform_real_distribution<double> pos(0, 1000), jitter(-30, 30), axis(2, 20);
  ingest::Swipe s;
  s.user = user;
  s.id = id;
  const int n = len(rng);
  double x = pos(rng), y = pos(rng);
  std::int64_t t = 1000 + step(rng);
  for (int i = 0; i < n; ++i) {
    const auto a = i == 0 ? ingest::Action::down : i + 1 == n ? ingest::Action::up : ingest::Action::move;
    s.events.push_back(ev(x, y, t, a, axis(rng), axis(rng)));
    x += jitter(rng);
    y += jitter(rng);
    t += step(rng);
  }
  return s;
}

/// Two Gaussian clouds one unit apart per axis with tiny spread.
inline std::pair<Matrix, Eigen::VectorXi> separable_toy(int per_class, int dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, 0.05);
  Matrix X(2 * per_class, dims);
  Eigen::VectorXi y(2 * per_class);
  for (int i = 0; i < 2 * per_class; ++i) {
    const bool pos = i < per_class;
    for (int j = 0; j < dims; ++j) X(i, j) = (pos ? 1.0 : 0.0) + z(rng);
    y(i) = pos ? 1 : 0;
  }
  return {X, y};
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                            double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, scale);
  Matrix X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = z(rng);
  return X;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace tcas::testing
