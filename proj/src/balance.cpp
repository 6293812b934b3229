#include "tcas/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcas/errors.hpp"
#include "tcas/features.hpp"
#include "tcas/seeding.hpp"

namespace tcas::balance {

void AdasynConfig::validate() const {
  if (k < 1) throw ConfigError("balance.k must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("balance.beta must lie in [0, 1]");
}

namespace {

// Indices of the `k` nearest rows of `pool` to `query`, nearest first, ties by
// index. `skip` excludes the query itself when it is part of the pool.
std::vector<Eigen::Index> nearest(const Matrix& pool, const RowVector& query,
                                  std::size_t k, Eigen::Index skip) {
  std::vector<std::pair<double, Eigen::Index>> d;
  d.reserve(static_cast<std::size_t>(pool.rows()));
  for (Eigen::Index r = 0; r < pool.rows(); ++r)
    if (r != skip) d.emplace_back((pool.row(r) - query).squaredNorm(), r);
  k = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<Eigen::Index> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
  return out;
}

}  // namespace

std::vector<std::size_t> allocate(const std::vector<double>& ratios, std::size_t budget,
                                  bool* uniform_fallback) {
  const std::size_t m = ratios.size();
  std::vector<std::size_t> g(m, 0);
  if (m == 0 || budget == 0) return g;
  const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  std::vector<double> norm(m);
  const bool uniform = !(total > 0);
  for (std::size_t i = 0; i < m; ++i)
    norm[i] = uniform ? 1.0 / static_cast<double>(m) : ratios[i] / total;
  if (uniform_fallback) *uniform_fallback = uniform;

  long long assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    g[i] = static_cast<std::size_t>(std::llround(norm[i] * static_cast<double>(budget)));
    assigned += static_cast<long long>(g[i]);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norm[a] > norm[b]; });
  long long residue = static_cast<long long>(budget) - assigned;
  for (std::size_t c = 0; residue > 0; c = (c + 1) % m, --residue) ++g[order[c]];
  // Over-allocation: take back from the lowest-ratio seeds first.
  for (std::size_t c = m; residue < 0;) {
    c = (c == 0 ? m : c) - 1;
    if (g[order[c]] > 0) {
      --g[order[c]];
      ++residue;
    }
  }
  return g;
}

AdasynResult adasyn(const Matrix& minority, const Matrix& majority,
                    const AdasynConfig& cfg) {
  cfg.validate();
  if (minority.cols() != majority.cols())
    throw DimensionMismatch("adasyn: minority and majority dimensions differ");
  if (minority.rows() > majority.rows())
    throw ImbalanceError("adasyn: minority class is larger than majority class");

  AdasynResult res;
  const auto m_min = static_cast<std::size_t>(minority.rows());
  const auto m_maj = static_cast<std::size_t>(majority.rows());
  res.budget = static_cast<std::size_t>(
      std::llround(static_cast<double>(m_maj - m_min) * cfg.beta));
  res.synthetic.resize(0, minority.cols());
  if (res.budget == 0) return res;
  if (m_min < 2) throw InsufficientData("adasyn: need at least 2 minority samples");

  Matrix combined(minority.rows() + majority.rows(), minority.cols());
  combined << minority, majority;
  const auto scaler = features::Standardizer::fit(combined);
  const Matrix z = scaler.transform(combined);
  const Matrix z_min = z.topRows(minority.rows());
  const auto k = static_cast<std::size_t>(cfg.k);

  res.ratios.resize(m_min);
  std::vector<std::vector<Eigen::Index>> neighbours(m_min);
  for (std::size_t i = 0; i < m_min; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    auto nn = nearest(z, z.row(row), k, row);
    const auto majority_hits = std::count_if(nn.begin(), nn.end(), [&](Eigen::Index j) {
      return j >= minority.rows();
    });
    res.ratios[i] = static_cast<double>(majority_hits) / static_cast<double>(nn.size());
    neighbours[i] = nearest(z_min, z_min.row(row), k, row);
  }
  res.counts = allocate(res.ratios, res.budget, &res.uniform_fallback);
  const double total = std::accumulate(res.ratios.begin(), res.ratios.end(), 0.0);
  for (auto& r : res.ratios)
    r = res.uniform_fallback ? 1.0 / static_cast<double>(m_min) : r / total;

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  res.synthetic.resize(static_cast<Eigen::Index>(res.budget), minority.cols());
  res.origins.reserve(res.budget);
  Eigen::Index out = 0;
  for (std::size_t i = 0; i < m_min; ++i) {
    const auto& nn = neighbours[i];
    std::uniform_int_distribution<std::size_t> pick(0, nn.size() - 1);
    for (std::size_t s = 0; s < res.counts[i]; ++s) {
      const Eigen::Index zi = nn[pick(rng)];
      const double lambda = unit(rng);
      const auto xi = minority.row(static_cast<Eigen::Index>(i));
      res.synthetic.row(out++) = xi + lambda * (minority.row(zi) - xi);
      res.origins.push_back({i, static_cast<std::size_t>(zi), lambda});
    }
  }
  return res;
}

std::vector<windowing::WindowSample> undersample_impostors(
    const windowing::WindowSet& train, const std::string& genuine_user,
    std::size_t per_impostor, std::uint64_t seed) {
  if (train.size() < 2 || !train.count(genuine_user))
    throw InsufficientData("undersample: need the genuine user and at least one impostor");
  Rng rng(seed);
  std::vector<windowing::WindowSample> out;
  for (const auto& [user, rows] : train) {
    if (user == genuine_user) continue;
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(per_impostor, idx.size()));
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) out.push_back(rows[i]);
  }
  return out;
}

Matrix BalancedSet::genuine() const {
  Matrix g(y.sum(), X.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    if (y(i) == 1) g.row(r++) = X.row(i);
  return g;
}

Matrix BalancedSet::impostor() const {
  Matrix g(X.rows() - y.sum(), X.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    if (y(i) == 0) g.row(r++) = X.row(i);
  return g;
}

namespace {

Matrix trim_rows(const Matrix& X, Eigen::Index keep, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(keep));
  std::sort(idx.begin(), idx.end());
  Matrix out(keep, X.cols());
  for (Eigen::Index i = 0; i < keep; ++i) out.row(i) = X.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

BalancedSet balance_training_set(const Matrix& genuine, const Matrix& impostor,
                                 const AdasynConfig& cfg) {
  if (genuine.rows() == 0 || impostor.rows() == 0)
    throw InsufficientData("balance: both classes need at least one sample");
  if (genuine.cols() != impostor.cols())
    throw DimensionMismatch("balance: class dimensions differ");

  BalancedSet out;
  out.genuine_real = static_cast<std::size_t>(genuine.rows());
  out.impostor_real = static_cast<std::size_t>(impostor.rows());
  Matrix g = genuine;
  Matrix im = impostor;
  if (g.rows() != im.rows()) {
    const bool genuine_small = g.rows() < im.rows();
    Matrix& small = genuine_small ? g : im;
    const Matrix& large = genuine_small ? im : g;
    AdasynResult res = adasyn(small, large, cfg);
    out.synthetic = res.budget;
    out.oversampled = genuine_small ? "genuine" : "impostor";
    Matrix grown(small.rows() + res.synthetic.rows(), small.cols());
    grown << small, res.synthetic;
    small = std::move(grown);
  }
  if (g.rows() != im.rows()) {
    Rng rng(derive_seed(cfg.seed, "balance/trim"));
    const Eigen::Index keep = std::min(g.rows(), im.rows());
    out.trimmed = static_cast<std::size_t>(std::max(g.rows(), im.rows()) - keep);
    if (g.rows() > keep) g = trim_rows(g, keep, rng);
    else im = trim_rows(im, keep, rng);
  }
  out.X.resize(g.rows() + im.rows(), g.cols());
  out.X << g, im;
  out.y.resize(out.X.rows());
  out.y.head(g.rows()).setOnes();
  out.y.tail(im.rows()).setZero();
  return out;
}

}  // namespace tcas::balance
