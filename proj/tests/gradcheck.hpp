#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "tcas/types.hpp"

namespace tcas::testing {

/// Largest relative error between `analytic` and central differences of
/// `loss` (step h) over `probes` randomly chosen coordinates of theta.
inline double max_gradient_error(const std::function<double(const Vector&)>& loss,
                                 const Vector& theta, const Vector& analytic, int probes,
                                 std::uint64_t seed, double h = 1e-5) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, theta.size() - 1);
  double worst = 0;
  for (int p = 0; p < probes; ++p) {
    const Eigen::Index i = pick(rng);
    Vector up = theta, down = theta;
    up(i) += h;
    down(i) -= h;
    const double numeric = (loss(up) - loss(down)) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic(i)), 1e-7});
    worst = std::max(worst, std::abs(numeric - analytic(i)) / scale);
  }
  return worst;
}

}  // namespace tcas::testing
