#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "tcas/types.hpp"
#include "tcas/windowing.hpp"

namespace tcas::attacks {

enum class Scenario { zero_effort, population_same, population_different };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s);  // throws ConfigError

struct PopulationAttackConfig {
  std::size_t n = 1000;  // attack vectors to generate
  double spread = 3.0;   // standard deviation of the per-cell multiplier
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-column mean and (population) standard deviation.
template <typename Derived>
std::pair<RowVector, RowVector> column_stats(const Eigen::MatrixBase<Derived>& X) {
  RowVector mu = X.colwise().mean();
  RowVector sigma =
      ((X.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(X.rows()))
          .sqrt();
  return {mu, sigma};
}

/// n vectors with cell (i, j) = mu[j] + r * sigma[j], r ~ N(0, spread) drawn
/// independently per cell in row-major order.
Matrix population_attack(const Matrix& X, const PopulationAttackConfig& cfg);

struct AttackSet {
  Scenario scenario = Scenario::zero_effort;
  Matrix vectors;      // one attack sample per row
  std::string source;  // dataset the vectors were derived from
  nlohmann::json config = nlohmann::json::object();
};

/// Every test window of users other than `genuine_user`. An absent target
/// yields an empty set and a warning.
AttackSet zero_effort_set(const windowing::WindowSet& test, const std::string& genuine_user,
                          std::vector<std::string>* warnings = nullptr);

struct AttackSource {
  std::string id;
  const windowing::WindowSet* windows = nullptr;
};

/// population_same draws statistics from the primary dataset, population_different
/// from `attack` (MissingDataset when absent or identical to the primary).
/// zero_effort needs `genuine_user` and uses the primary windows as the test partition.
AttackSet build_attack_set(Scenario scenario, const AttackSource& primary,
                           const std::optional<AttackSource>& attack,
                           const PopulationAttackConfig& cfg,
                           const std::string& genuine_user = {});

/// Labeled feature CSV with trailing `scenario,source` columns.
void write_attack_csv(std::ostream& out, const AttackSet& set, Device device);
AttackSet read_attack_csv(std::istream& in);

}  // namespace tcas::attacks
