#include "tcas/tuning.hpp"

#include <algorithm>
#include <numeric>

#include "tcas/errors.hpp"
#include "tcas/seeding.hpp"

namespace tcas::learners {

using nlohmann::json;

std::vector<json> HyperGrid::candidates(Algorithm a) const {
  std::vector<json> out = {json::object()};
  for (const auto& [name, vals] : values) {
    if (vals.empty()) throw ConfigError("grid for '" + name + "' has no values");
    std::vector<json> next;
    for (const auto& c : out)
      for (const auto& v : vals) {
        json d = c;
        d[name] = v;
        next.push_back(std::move(d));
      }
    out = std::move(next);
  }
  if (a == Algorithm::svm) {
    std::vector<json> dedup;
    for (auto c : out) {
      if (c.value("kernel", std::string("rbf")) == "linear") c.erase("gamma");
      if (std::find(dedup.begin(), dedup.end(), c) == dedup.end()) dedup.push_back(std::move(c));
    }
    out = std::move(dedup);
  }
  return out;
}

HyperGrid HyperGrid::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("hyperparameter grid must be a JSON object");
  HyperGrid g;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_array() || v.empty())
      throw ConfigError("grid key '" + k + "' must be a non-empty array");
    g.values[k] = v.get<std::vector<json>>();
  }
  return g;
}

json HyperGrid::to_json() const {
  json j = json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

HyperGrid default_grid(Algorithm a) {
  HyperGrid g;
  switch (a) {
    case Algorithm::svm:
      g.values = {{"C", {0.1, 1.0, 10.0}},
                  {"kernel", {"linear", "rbf"}},
                  {"gamma", {0.01, 0.1, 1.0}}};
      break;
    case Algorithm::random_forest:
      g.values = {{"trees", {100, 300}}, {"max_depth", {8, 16}}};
      break;
    case Algorithm::mlp:
      g.values = {{"hidden", {json::array({32}), json::array({64, 32})}},
                  {"learning_rate", {1e-2, 1e-3}}};
      break;
    case Algorithm::gbt:
      g.values = {{"trees", {100, 300}}, {"max_depth", {3, 5}}, {"shrinkage", {0.1, 0.3}}};
      break;
  }
  return g;
}

double balanced_accuracy(const Eigen::VectorXi& truth, const Eigen::VectorXi& pred) {
  double tp = 0, p = 0, tn = 0, n = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth(i) == 1) {
      ++p;
      tp += pred(i) == 1;
    } else {
      ++n;
      tn += pred(i) != 1;
    }
  }
  return 0.5 * ((p > 0 ? tp / p : 0.0) + (n > 0 ? tn / n : 0.0));
}

std::vector<int> stratified_folds(const Eigen::VectorXi& y, int k, std::uint64_t seed) {
  std::vector<int> fold(static_cast<std::size_t>(y.size()), 0);
  Rng rng(seed);
  for (int cls : {1, 0}) {
    std::vector<std::size_t> idx;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if ((y(i) == 1) == (cls == 1)) idx.push_back(static_cast<std::size_t>(i));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t r = 0; r < idx.size(); ++r) fold[idx[r]] = static_cast<int>(r % static_cast<std::size_t>(k));
  }
  return fold;
}

std::vector<double> capacity(Algorithm a, const json& p) {
  switch (a) {
    case Algorithm::svm: {
      const bool rbf = p.value("kernel", std::string("rbf")) == "rbf";
      return {p.value("C", 1.0), rbf ? 1.0 : 0.0, rbf ? p.value("gamma", 0.1) : 0.0};
    }
    case Algorithm::random_forest:
      return {p.value("trees", 100.0), p.value("max_depth", 8.0)};
    case Algorithm::mlp: {
      const auto params = mlp_params_from_json(p);
      const double units = std::accumulate(params.hidden.begin(), params.hidden.end(), 0.0);
      return {units, static_cast<double>(params.hidden.size())};
    }
    case Algorithm::gbt:
      return {p.value("trees", 100.0), p.value("max_depth", 3.0), p.value("shrinkage", 0.1)};
  }
  return {};
}

namespace {

Matrix take_rows(const Matrix& X, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
  return out;
}

Eigen::VectorXi take(const Eigen::VectorXi& y, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = y(rows[r]);
  return out;
}

}  // namespace

TuneResult tune(Algorithm a, const Matrix& X, const Eigen::VectorXi& y, const HyperGrid& grid,
                int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("tune: folds must be >= 2");
  const auto pos = (y.array() == 1).count();
  const auto neg = y.size() - pos;
  if (pos < k || neg < k)
    throw InsufficientData("tune: each class needs at least " + std::to_string(k) +
                           " samples (have " + std::to_string(pos) + " genuine, " +
                           std::to_string(neg) + " impostor)");
  const auto cands = grid.candidates(a);
  if (cands.empty()) throw ConfigError("tune: empty grid");

  const auto fold = stratified_folds(y, k, derive_seed(seed, "tune/folds"));
  struct Split {
    Matrix Xtr, Xte;
    Eigen::VectorXi ytr, yte;
  };
  std::vector<Split> splits(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> tr, te;
    for (std::size_t i = 0; i < fold.size(); ++i)
      (fold[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
    auto& s = splits[static_cast<std::size_t>(f)];
    s.Xtr = take_rows(X, tr);
    s.Xte = take_rows(X, te);
    s.ytr = take(y, tr);
    s.yte = take(y, te);
  }

  TuneResult res;
  for (const auto& c : cands) {
    CandidateScore cs;
    cs.params = c;
    for (int f = 0; f < k; ++f) {
      const auto& s = splits[static_cast<std::size_t>(f)];
      const auto model = train(a, s.Xtr, s.ytr, c, derive_seed(seed, "tune/fit", std::to_string(f)));
      Eigen::VectorXi pred(s.Xte.rows());
      for (Eigen::Index i = 0; i < s.Xte.rows(); ++i) pred(i) = predict_label(model, s.Xte.row(i));
      cs.fold_scores.push_back(balanced_accuracy(s.yte, pred));
    }
    cs.mean = std::accumulate(cs.fold_scores.begin(), cs.fold_scores.end(), 0.0) / k;
    res.candidates.push_back(std::move(cs));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < res.candidates.size(); ++i) {
    const auto& c = res.candidates[i];
    const auto& b = res.candidates[best];
    if (c.mean > b.mean ||
        (c.mean == b.mean && capacity(a, c.params) < capacity(a, b.params)))
      best = i;
  }
  res.best = res.candidates[best].params;
  res.best_score = res.candidates[best].mean;
  return res;
}

}  // namespace tcas::learners
