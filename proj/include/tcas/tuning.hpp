#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "tcas/classifier.hpp"

namespace tcas::learners {

/// Parameter name -> candidate values. Candidates are the Cartesian product
/// with keys in lexicographic order; `gamma` is dropped for the linear SVM
/// kernel and the resulting duplicates removed.
struct HyperGrid {
  std::map<std::string, std::vector<nlohmann::json>> values;

  std::vector<nlohmann::json> candidates(Algorithm a) const;

  static HyperGrid from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

HyperGrid default_grid(Algorithm a);

/// (TPR + TNR) / 2 of labels `pred` against `truth`; a missing class counts
/// its rate as 0.
double balanced_accuracy(const Eigen::VectorXi& truth, const Eigen::VectorXi& pred);

/// Per-sample fold index 0..k-1. Each class is shuffled with the seed and
/// dealt round-robin, so fold class counts differ by at most one.
std::vector<int> stratified_folds(const Eigen::VectorXi& y, int k, std::uint64_t seed);

struct CandidateScore {
  nlohmann::json params;
  std::vector<double> fold_scores;
  double mean = 0;
};

struct TuneResult {
  nlohmann::json best;
  double best_score = 0;
  std::vector<CandidateScore> candidates;
};

/// Stratified k-fold search by mean balanced accuracy. Ties go to the
/// smaller-capacity candidate, then to grid order. Throws InsufficientData if
/// a class has fewer than k samples.
TuneResult tune(Algorithm a, const Matrix& X, const Eigen::VectorXi& y, const HyperGrid& grid,
                int k, std::uint64_t seed);

/// Capacity key used for tie-breaking; lexicographically smaller = simpler.
std::vector<double> capacity(Algorithm a, const nlohmann::json& params);

}  // namespace tcas::learners
