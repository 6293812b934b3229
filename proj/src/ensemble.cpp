#include "tcas/ensemble.hpp"

#include <cmath>

#include "tcas/errors.hpp"
#include "tcas/seeding.hpp"

namespace tcas::learners {

double ForestModel::score(const Eigen::Ref<const RowVector>& x) const {
  double s = 0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

ForestModel fit_forest(const Matrix& X, const Eigen::VectorXi& y, const ForestParams& p,
                       std::uint64_t seed) {
  if (p.trees < 1 || p.max_depth < 1 || p.min_leaf < 1)
    throw ConfigError("random_forest: trees, max_depth and min_leaf must be >= 1");
  const auto data = tree::bin(X);
  tree::GiniParams gp;
  gp.max_depth = p.max_depth;
  gp.min_leaf = p.min_leaf;
  gp.mtry = p.mtry > 0 ? p.mtry
                       : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(X.cols())))));
  ForestModel m;
  m.trees.reserve(static_cast<std::size_t>(p.trees));
  const auto n = static_cast<std::size_t>(X.rows());
  for (int t = 0; t < p.trees; ++t) {
    const auto tree_seed = derive_seed(seed, "forest/tree", std::to_string(t));
    Rng rng(tree_seed);
    std::uniform_int_distribution<Eigen::Index> draw(0, X.rows() - 1);
    std::vector<Eigen::Index> bag(n);
    for (auto& i : bag) i = draw(rng);
    m.trees.push_back(tree::grow_gini(data, y, std::move(bag), gp, rng()));
  }
  return m;
}

ForestParams forest_params_from_json(const nlohmann::json& j) {
  ForestParams p;
  p.trees = j.value("trees", p.trees);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.min_leaf = j.value("min_leaf", p.min_leaf);
  p.mtry = j.value("mtry", p.mtry);
  return p;
}

nlohmann::json to_json(const ForestModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) trees.push_back(tree::to_json(t));
  return {{"trees", trees}};
}

ForestModel forest_from_json(const nlohmann::json& j) {
  ForestModel m;
  try {
    for (const auto& t : j.at("trees")) m.trees.push_back(tree::tree_from_json(t));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("random_forest: ") + e.what());
  }
  if (m.trees.empty()) throw CorruptModel("random_forest: no trees");
  return m;
}

double GbtModel::margin(const Eigen::Ref<const RowVector>& x) const {
  double f = base;
  for (const auto& t : trees) f += shrinkage * t.predict(x);
  return f;
}

GbtModel fit_gbt(const Matrix& X, const Eigen::VectorXi& y, const GbtParams& p) {
  if (p.trees < 1 || p.max_depth < 1) throw ConfigError("gbt: trees and depth must be >= 1");
  if (!(p.shrinkage > 0)) throw ConfigError("gbt: shrinkage must be > 0");
  const auto data = tree::bin(X);
  const Eigen::Index n = X.rows();
  GbtModel m;
  m.shrinkage = p.shrinkage;
  const double pos = y.cast<double>().mean();
  m.base = std::log(pos / (1.0 - pos));

  tree::NewtonParams np;
  np.max_depth = p.max_depth;
  np.lambda = p.lambda;
  np.min_child_weight = p.min_child_weight;

  Vector F = Vector::Constant(n, m.base);
  Vector g(n), h(n);
  for (int t = 0; t < p.trees; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = 1.0 / (1.0 + std::exp(-F(i)));
      g(i) = prob - y(i);
      h(i) = std::max(prob * (1.0 - prob), 1e-16);
    }
    tree::Tree tr = tree::grow_newton(data, g, h, np);
    for (Eigen::Index i = 0; i < n; ++i) F(i) += p.shrinkage * tr.predict(X.row(i));
    m.trees.push_back(std::move(tr));
  }
  return m;
}

GbtParams gbt_params_from_json(const nlohmann::json& j) {
  GbtParams p;
  p.trees = j.value("trees", p.trees);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.shrinkage = j.value("shrinkage", p.shrinkage);
  p.lambda = j.value("lambda", p.lambda);
  p.min_child_weight = j.value("min_child_weight", p.min_child_weight);
  return p;
}

nlohmann::json to_json(const GbtModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) trees.push_back(tree::to_json(t));
  return {{"trees", trees}, {"shrinkage", m.shrinkage}, {"base", m.base}};
}

GbtModel gbt_from_json(const nlohmann::json& j) {
  GbtModel m;
  try {
    for (const auto& t : j.at("trees")) m.trees.push_back(tree::tree_from_json(t));
    m.shrinkage = j.at("shrinkage").get<double>();
    m.base = j.at("base").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("gbt: ") + e.what());
  }
  return m;
}

}  // namespace tcas::learners
