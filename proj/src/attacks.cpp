#include "tcas/attacks.hpp"

#include <istream>
#include <ostream>

#include "tcas/errors.hpp"
#include "tcas/features.hpp"
#include "tcas/seeding.hpp"

namespace tcas::attacks {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::zero_effort: return "zero_effort";
    case Scenario::population_same: return "population_same";
    case Scenario::population_different: return "population_different";
  }
  return "zero_effort";
}

Scenario parse_scenario(std::string_view s) {
  if (s == "zero_effort") return Scenario::zero_effort;
  if (s == "population_same") return Scenario::population_same;
  if (s == "population_different") return Scenario::population_different;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

void PopulationAttackConfig::validate() const {
  if (n < 1) throw ConfigError("attack.n must be >= 1");
  if (!(spread > 0)) throw ConfigError("attack.spread must be > 0");
}

Matrix population_attack(const Matrix& X, const PopulationAttackConfig& cfg) {
  cfg.validate();
  if (X.rows() == 0) throw EmptySource("population attack: source matrix has no rows");
  if (X.cols() != kNumFeatures)
    throw DimensionMismatch("population attack: source must have 47 columns");
  const auto [mu, sigma] = column_stats(X);
  Rng rng(cfg.seed);
  std::normal_distribution<double> r(0.0, cfg.spread);
  Matrix out(static_cast<Eigen::Index>(cfg.n), X.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = mu(j) + r(rng) * sigma(j);
  return out;
}

AttackSet zero_effort_set(const windowing::WindowSet& test, const std::string& genuine_user,
                          std::vector<std::string>* warnings) {
  AttackSet set;
  set.scenario = Scenario::zero_effort;
  set.vectors.resize(0, kNumFeatures);
  if (!test.count(genuine_user)) {
    if (warnings) warnings->push_back("zero-effort: target user " + genuine_user + " absent");
    return set;
  }
  std::vector<windowing::WindowSample> rows;
  for (const auto& [user, w] : test)
    if (user != genuine_user) rows.insert(rows.end(), w.begin(), w.end());
  set.vectors = windowing::stack(rows);
  set.config = {{"genuine_user", genuine_user}};
  return set;
}

namespace {

Matrix all_windows(const windowing::WindowSet& set) {
  std::vector<windowing::WindowSample> rows;
  for (const auto& [_, w] : set) rows.insert(rows.end(), w.begin(), w.end());
  return windowing::stack(rows);
}

}  // namespace

AttackSet build_attack_set(Scenario scenario, const AttackSource& primary,
                           const std::optional<AttackSource>& attack,
                           const PopulationAttackConfig& cfg,
                           const std::string& genuine_user) {
  if (scenario == Scenario::zero_effort) {
    AttackSet s = zero_effort_set(*primary.windows, genuine_user);
    s.source = primary.id;
    return s;
  }
  const AttackSource* src = &primary;
  if (scenario == Scenario::population_different) {
    if (!attack || !attack->windows)
      throw MissingDataset("population_different requires a second (attack) dataset");
    if (attack->id == primary.id)
      throw MissingDataset("population_different requires an attack dataset distinct from the primary");
    src = &*attack;
  }
  AttackSet s;
  s.scenario = scenario;
  s.source = src->id;
  s.vectors = population_attack(all_windows(*src->windows), cfg);
  s.config = {{"n", cfg.n}, {"spread", cfg.spread}, {"seed", cfg.seed}};
  return s;
}

void write_attack_csv(std::ostream& out, const AttackSet& set, Device device) {
  std::vector<features::FeatureVector> rows(static_cast<std::size_t>(set.vectors.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].user = "attack";
    rows[i].device = device;
    rows[i].id = static_cast<int>(i);
    rows[i].values = set.vectors.row(static_cast<Eigen::Index>(i));
  }
  features::ExtraColumns extra = {
      {"scenario", std::vector<std::string>(rows.size(), std::string(to_string(set.scenario)))},
      {"source", std::vector<std::string>(rows.size(), set.source)}};
  features::write_feature_csv(out, rows, "attack_id", extra);
}

AttackSet read_attack_csv(std::istream& in) {
  auto file = features::read_feature_csv(in);
  if (!file.extra.count("scenario") || !file.extra.count("source"))
    throw SchemaError(1, "attack file needs scenario and source columns");
  AttackSet set;
  set.vectors = features::stack(file.rows);
  if (!file.rows.empty()) {
    set.scenario = parse_scenario(file.extra["scenario"].front());
    set.source = file.extra["source"].front();
  }
  return set;
}

}  // namespace tcas::attacks
