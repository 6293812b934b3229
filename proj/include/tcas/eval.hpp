#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "tcas/errors.hpp"
#include "tcas/seeding.hpp"
#include "tcas/types.hpp"

namespace tcas::eval {

inline constexpr double kThreshold = 0.5;

struct Rates {
  double far = 0;
  double frr = 0;
  double hter = 0;
};

inline double hter(double far, double frr) { return (far + frr) / 2.0; }

/// Fraction of impostor scores >= threshold. Throws EmptyScores when empty.
double far(const Vector& impostor, double threshold = kThreshold);
/// Fraction of genuine scores < threshold. Throws EmptyScores when empty.
double frr(const Vector& genuine, double threshold = kThreshold);
Rates metrics(const Vector& genuine, const Vector& impostor, double threshold = kThreshold);

enum class Ordering { chronological, seeded_random };

std::string_view to_string(Ordering o);
Ordering parse_ordering(std::string_view s);

struct SplitConfig {
  double train_fraction = 0.6;
  Ordering ordering = Ordering::chronological;
  std::uint64_t seed = 0;
  std::size_t min_items = 10;  // users with fewer swipes are dropped

  void validate() const;  // throws ConfigError
};

/// Indices of the first floor(f * n) items (chronological) or a seeded
/// subset of that size; both index lists stay in ascending order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const SplitConfig& cfg, std::string_view key);

template <typename Seq>
struct Partition {
  std::map<std::string, Seq> train, test;
  std::vector<std::string> dropped;  // users below min_items
};

/// Per-user split of time-ordered sequences. Users below cfg.min_items are
/// dropped and listed; each user's random draw is seeded by its id.
template <typename Seq>
Partition<Seq> split(const std::map<std::string, Seq>& users, const SplitConfig& cfg) {
  cfg.validate();
  Partition<Seq> out;
  for (const auto& [user, items] : users) {
    if (items.size() < cfg.min_items) {
      out.dropped.push_back(user);
      continue;
    }
    const auto [tr, te] = split_indices(items.size(), cfg, user);
    auto& a = out.train[user];
    auto& b = out.test[user];
    for (auto i : tr) a.push_back(items[i]);
    for (auto i : te) b.push_back(items[i]);
  }
  return out;
}

struct Pca {
  RowVector mean;
  Matrix components;  // 2 x d, orthonormal rows
  Vector explained;   // variances along the components, descending
  Matrix projected;   // n x 2
  int rank = 0;
  bool degenerate = false;
  std::vector<std::string> warnings;
};

/// Top two principal components of the sample covariance (n - 1 denominator).
/// Each component's largest-magnitude loading is made positive. With
/// covariance rank below 2 the result is flagged degenerate and a warning
/// recorded; `strict` turns that into DegenerateData.
Pca pca_top2(const Matrix& X, bool strict = false);

}  // namespace tcas::eval
