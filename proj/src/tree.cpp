#include "tcas/tree.hpp"

#include <algorithm>
#include <numeric>

#include "tcas/errors.hpp"
#include "tcas/seeding.hpp"

namespace tcas::tree {

BinnedData bin(const Matrix& X, int max_bins) {
  BinnedData d;
  d.rows = X.rows();
  d.cols = X.cols();
  d.edges.resize(static_cast<std::size_t>(X.cols()));
  d.codes.resize(static_cast<std::size_t>(X.rows() * X.cols()));
  const auto B = static_cast<std::size_t>(std::clamp(max_bins, 2, 256));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    std::vector<double> u(X.col(j).data(), X.col(j).data() + X.rows());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    auto& e = d.edges[static_cast<std::size_t>(j)];
    if (u.size() <= B) {
      e = u;
    } else {
      e.resize(B);
      for (std::size_t k = 0; k < B; ++k) e[k] = u[(k + 1) * u.size() / B - 1];
    }
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      auto it = std::lower_bound(e.begin(), e.end(), X(i, j));
      d.codes[static_cast<std::size_t>(j * X.rows() + i)] =
          static_cast<std::uint8_t>(std::min<std::ptrdiff_t>(it - e.begin(),
                                                             static_cast<std::ptrdiff_t>(e.size()) - 1));
    }
  }
  return d;
}

namespace {

struct Split {
  int feature = -1;
  int bin = -1;
  double score = 0;
};

using Samples = std::vector<Eigen::Index>;

void partition(const BinnedData& data, const Split& s, Samples& samples, Samples& left,
               Samples& right) {
  for (auto i : samples)
    (data.code(i, s.feature) <= s.bin ? left : right).push_back(i);
  Samples().swap(samples);
}

class GiniGrower {
 public:
  GiniGrower(const BinnedData& data, const Eigen::VectorXi& y, const GiniParams& p,
             std::uint64_t seed)
      : data_(data), y_(y), p_(p), rng_(seed), features_(static_cast<std::size_t>(data.cols)) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  int grow(Samples samples, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double n = static_cast<double>(samples.size());
    double pos = 0;
    for (auto i : samples) pos += y_(i);
    tree.nodes[static_cast<std::size_t>(id)].value = n > 0 ? pos / n : 0.5;

    if (depth >= p_.max_depth || pos == 0 || pos == n ||
        samples.size() < 2 * static_cast<std::size_t>(p_.min_leaf))
      return id;
    const Split s = best_split(samples, n, pos);
    if (s.feature < 0) return id;

    Samples left, right;
    partition(data_, s, samples, left, right);
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    Node& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = s.feature;
    node.threshold = data_.edges[static_cast<std::size_t>(s.feature)][static_cast<std::size_t>(s.bin)];
    node.left = l;
    node.right = r;
    return id;
  }

  Tree tree;

 private:
  Split best_split(const Samples& samples, double n, double pos) {
    const std::size_t F = features_.size();
    std::size_t tries = p_.mtry > 0 ? std::min<std::size_t>(static_cast<std::size_t>(p_.mtry), F) : F;
    for (std::size_t k = 0; k < tries; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, F - 1);
      std::swap(features_[k], features_[pick(rng_)]);
    }
    const double parent = n * 2.0 * (pos / n) * (1.0 - pos / n);
    Split best;
    best.score = parent - 1e-12;
    double cnt[kMaxBins * 4], ones[kMaxBins * 4];
    for (std::size_t k = 0; k < tries; ++k) {
      const int f = features_[k];
      const auto nb = data_.edges[static_cast<std::size_t>(f)].size();
      if (nb < 2) continue;
      std::fill(cnt, cnt + nb, 0.0);
      std::fill(ones, ones + nb, 0.0);
      for (auto i : samples) {
        const auto b = data_.code(i, f);
        cnt[b] += 1;
        ones[b] += y_(i);
      }
      double nl = 0, pl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        nl += cnt[b];
        pl += ones[b];
        const double nr = n - nl, pr = pos - pl;
        if (nl < p_.min_leaf || nr < p_.min_leaf) continue;
        const double imp = 2.0 * pl * (1.0 - pl / nl) + 2.0 * pr * (1.0 - pr / nr);
        if (imp < best.score) {
          best = {f, static_cast<int>(b), imp};
        }
      }
    }
    return best;
  }

  const BinnedData& data_;
  const Eigen::VectorXi& y_;
  GiniParams p_;
  Rng rng_;
  std::vector<int> features_;
};

class NewtonGrower {
 public:
  NewtonGrower(const BinnedData& data, const Vector& g, const Vector& h, const NewtonParams& p)
      : data_(data), g_(g), h_(h), p_(p) {}

  int grow(Samples samples, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double G = 0, H = 0;
    for (auto i : samples) {
      G += g_(i);
      H += h_(i);
    }
    tree.nodes[static_cast<std::size_t>(id)].value = -G / (H + p_.lambda);
    if (depth >= p_.max_depth || samples.size() < 2) return id;
    const Split s = best_split(samples, G, H);
    if (s.feature < 0) return id;

    Samples left, right;
    partition(data_, s, samples, left, right);
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    Node& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = s.feature;
    node.threshold = data_.edges[static_cast<std::size_t>(s.feature)][static_cast<std::size_t>(s.bin)];
    node.left = l;
    node.right = r;
    return id;
  }

  Tree tree;

 private:
  Split best_split(const Samples& samples, double G, double H) {
    const double parent = G * G / (H + p_.lambda);
    Split best;
    best.score = 1e-12;
    double gs[kMaxBins * 4], hs[kMaxBins * 4];
    for (int f = 0; f < static_cast<int>(data_.cols); ++f) {
      const auto nb = data_.edges[static_cast<std::size_t>(f)].size();
      if (nb < 2) continue;
      std::fill(gs, gs + nb, 0.0);
      std::fill(hs, hs + nb, 0.0);
      for (auto i : samples) {
        const auto b = data_.code(i, f);
        gs[b] += g_(i);
        hs[b] += h_(i);
      }
      double gl = 0, hl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += gs[b];
        hl += hs[b];
        const double gr = G - gl, hr = H - hl;
        if (hl < p_.min_child_weight || hr < p_.min_child_weight) continue;
        const double gain =
            0.5 * (gl * gl / (hl + p_.lambda) + gr * gr / (hr + p_.lambda) - parent) - p_.gamma;
        if (gain > best.score) best = {f, static_cast<int>(b), gain};
      }
    }
    return best;
  }

  const BinnedData& data_;
  const Vector& g_;
  const Vector& h_;
  NewtonParams p_;
};

}  // namespace

Tree grow_gini(const BinnedData& data, const Eigen::VectorXi& y, std::vector<Eigen::Index> samples,
               const GiniParams& params, std::uint64_t seed) {
  GiniGrower g(data, y, params, seed);
  g.grow(std::move(samples), 0);
  return std::move(g.tree);
}

Tree grow_newton(const BinnedData& data, const Vector& grad, const Vector& hess,
                 const NewtonParams& params) {
  NewtonGrower g(data, grad, hess, params);
  Samples all(static_cast<std::size_t>(data.rows));
  std::iota(all.begin(), all.end(), 0);
  g.grow(std::move(all), 0);
  return std::move(g.tree);
}

nlohmann::json to_json(const Tree& t) {
  std::vector<int> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    left.push_back(n.left);
    right.push_back(n.right);
    threshold.push_back(n.threshold);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right}, {"value", value}};
}

Tree tree_from_json(const nlohmann::json& j) {
  Tree t;
  try {
    auto feature = j.at("feature").get<std::vector<int>>();
    auto threshold = j.at("threshold").get<std::vector<double>>();
    auto left = j.at("left").get<std::vector<int>>();
    auto right = j.at("right").get<std::vector<int>>();
    auto value = j.at("value").get<std::vector<double>>();
    const std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
        value.size() != n)
      throw CorruptModel("tree arrays have inconsistent lengths");
    for (std::size_t i = 0; i < n; ++i) {
      if (feature[i] >= 0 && (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
                              left[i] >= static_cast<int>(n) || right[i] >= static_cast<int>(n)))
        throw CorruptModel("tree child index out of range");
      t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("tree: ") + e.what());
  }
  return t;
}

}  // namespace tcas::tree
