#pragma once

// Binary decision trees over quantile-binned features, shared by the random
// forest and gradient boosting learners.
//
// Bin edges are actual training values picked by rank, and a split sends
// x <= edge left, so a fitted tree makes identical decisions after any
// strictly increasing per-feature transform of train and test inputs.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "tcas/types.hpp"

namespace tcas::tree {

inline constexpr int kMaxBins = 64;

struct BinnedData {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<std::vector<double>> edges;  // per feature, ascending
  std::vector<std::uint8_t> codes;         // column-major bin index

  std::uint8_t code(Eigen::Index row, Eigen::Index col) const {
    return codes[static_cast<std::size_t>(col * rows + row)];
  }
};

BinnedData bin(const Matrix& X, int max_bins = kMaxBins);

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;
};

struct Tree {
  std::vector<Node> nodes;

  template <typename Row>
  double predict(const Row& x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const Node& n = nodes[static_cast<std::size_t>(i)];
      i = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }
};

/// Gini-impurity classification tree. `samples` may repeat rows (bootstrap);
/// `y` holds 0/1 labels. Leaves store the fraction of label 1.
struct GiniParams {
  int max_depth = 8;
  int min_leaf = 1;
  int mtry = 0;  // features tried per split, 0 = all
};

Tree grow_gini(const BinnedData& data, const Eigen::VectorXi& y,
               std::vector<Eigen::Index> samples, const GiniParams& params,
               std::uint64_t seed);

/// Second-order regression tree on gradient/hessian statistics; leaves store
/// -G/(H + lambda).
struct NewtonParams {
  int max_depth = 3;
  double lambda = 1.0;
  double min_child_weight = 1.0;
  double gamma = 0.0;
};

Tree grow_newton(const BinnedData& data, const Vector& grad, const Vector& hess,
                 const NewtonParams& params);

nlohmann::json to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);

}  // namespace tcas::tree
