#pragma once

#include <cstdint>

#include <json.hpp>

#include "tcas/tree.hpp"

namespace tcas::learners {

struct ForestParams {
  int trees = 100;
  int max_depth = 8;
  int min_leaf = 1;
  int mtry = 0;  // 0 = floor(sqrt(features))
};

/// Bagged Gini trees with per-split feature subsampling; the score is the
/// mean leaf fraction of genuine samples.
struct ForestModel {
  std::vector<tree::Tree> trees;

  double score(const Eigen::Ref<const RowVector>& x) const;
};

ForestModel fit_forest(const Matrix& X, const Eigen::VectorXi& y, const ForestParams& p,
                       std::uint64_t seed);

ForestParams forest_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ForestModel& m);
ForestModel forest_from_json(const nlohmann::json& j);

struct GbtParams {
  int trees = 100;
  int max_depth = 3;
  double shrinkage = 0.1;
  double lambda = 1.0;
  double min_child_weight = 1.0;
};

/// Logistic-loss gradient boosting with Newton leaf weights.
struct GbtModel {
  std::vector<tree::Tree> trees;
  double shrinkage = 0.1;
  double base = 0.0;  // initial logit

  double margin(const Eigen::Ref<const RowVector>& x) const;
};

GbtModel fit_gbt(const Matrix& X, const Eigen::VectorXi& y, const GbtParams& p);

GbtParams gbt_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GbtModel& m);
GbtModel gbt_from_json(const nlohmann::json& j);

}  // namespace tcas::learners
