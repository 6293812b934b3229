#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcas/types.hpp"
#include "tcas/windowing.hpp"

namespace tcas::balance {

struct AdasynConfig {
  int k = 5;          // neighbour count
  double beta = 1.0;  // desired balance level after synthesis, in [0, 1]
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct AdasynResult {
  Matrix synthetic;                 // G rows
  std::size_t budget = 0;           // G
  std::vector<double> ratios;       // normalised majority-neighbour ratio per seed
  std::vector<std::size_t> counts;  // synthetic points per seed, sums to G
  bool uniform_fallback = false;    // every seed had zero majority neighbours

  // Per synthetic row: seed index, minority neighbour index, interpolation weight.
  struct Origin {
    std::size_t seed;
    std::size_t neighbor;
    double lambda;
  };
  std::vector<Origin> origins;
};

/// Adaptive synthetic over-sampling of `minority` towards `majority`.
/// Neighbour search uses Euclidean distance on features standardised over
/// the combined set; synthetic points are generated in the input space.
AdasynResult adasyn(const Matrix& minority, const Matrix& majority,
                    const AdasynConfig& cfg);

/// Per-seed synthesis counts from density ratios: rounds r_i/sum(r) * G and
/// hands the rounding residue to the highest-ratio seeds so the total is G.
/// Falls back to a uniform split when every ratio is zero.
std::vector<std::size_t> allocate(const std::vector<double>& ratios, std::size_t budget,
                                  bool* uniform_fallback = nullptr);

/// Draws min(per_impostor, available) windows from every user other than
/// `genuine_user`, uniformly without replacement.
std::vector<windowing::WindowSample> undersample_impostors(
    const windowing::WindowSet& train, const std::string& genuine_user,
    std::size_t per_impostor, std::uint64_t seed);

struct BalancedSet {
  Matrix X;           // genuine rows first, then impostor rows
  Eigen::VectorXi y;  // 1 = genuine, 0 = impostor
  std::size_t genuine_real = 0;
  std::size_t impostor_real = 0;
  std::size_t synthetic = 0;  // ADASYN rows added to the smaller class
  std::size_t trimmed = 0;    // rows dropped from the larger class
  std::string oversampled;    // "genuine", "impostor" or "" when already balanced

  Matrix genuine() const;
  Matrix impostor() const;
};

/// ADASYN on the smaller class, then a seeded trim of the larger class if
/// rounding or beta < 1 leaves a gap. Class counts always come out equal.
BalancedSet balance_training_set(const Matrix& genuine, const Matrix& impostor,
                                 const AdasynConfig& cfg);

}  // namespace tcas::balance
