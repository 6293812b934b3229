#pragma once

// Orchestration of the full experiment: split, window, balance, train the
// vanilla and GAN-augmented verifiers per user, build attack sets, score.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcas/attacks.hpp"
#include "tcas/balance.hpp"
#include "tcas/classifier.hpp"
#include "tcas/eval.hpp"
#include "tcas/gan.hpp"
#include "tcas/report.hpp"
#include "tcas/tuning.hpp"
#include "tcas/windowing.hpp"

namespace tcas::pipeline {

enum class Mode { vanilla, gan };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

struct RunConfig {
  std::uint64_t master_seed = 0;
  std::string primary_path;                // raw events or feature CSV, CLI only
  std::optional<std::string> attack_path;  // second dataset for population_different
  std::optional<Device> device;
  windowing::WindowConfig window;
  eval::SplitConfig split;
  balance::AdasynConfig adasyn;
  std::size_t per_impostor = 4;
  attacks::PopulationAttackConfig attack;
  std::vector<learners::Algorithm> algorithms = {learners::kAlgorithms.begin(),
                                                 learners::kAlgorithms.end()};
  std::map<learners::Algorithm, learners::HyperGrid> grids;  // missing = default grid
  int folds = 5;
  bool tune = true;
  bool gan_enabled = true;
  gan::GanConfig gan;
  std::string output_dir = "out";
  int jobs = 0;  // 0 = hardware concurrency; never affects results

  /// Throws ConfigError naming the offending key. `master_seed` is required
  /// and unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
  /// Everything that influences results (jobs and paths excluded).
  nlohmann::json to_json() const;
  void validate() const;

  learners::HyperGrid grid(learners::Algorithm a) const;
};

struct Prepared {
  windowing::WindowSet train, test;
  std::vector<std::string> dropped;   // users below the split minimum
  std::vector<std::string> warnings;
};

/// Per-user chronological (or seeded) split of swipe vectors, then windowing
/// of each partition separately so no window straddles the split.
Prepared prepare(const features::FeatureSet& swipes, const RunConfig& cfg);

struct TrainedModel {
  learners::Algorithm algorithm;
  Mode mode;
  learners::ClassifierModel model;
};

struct UserModels {
  std::string user;
  std::vector<TrainedModel> models;
  std::optional<gan::GanPair> gans;
};

/// Balances the user's training windows, tunes and fits every configured
/// algorithm, and (if enabled) trains both GANs and refits on the augmented
/// set. Training details land in each model's metadata.
UserModels train_user(const windowing::WindowSet& train, const std::string& user,
                      const RunConfig& cfg);

/// train_user over all users on `jobs` worker threads; output is ordered by
/// user id regardless of scheduling.
std::vector<UserModels> train_all(const windowing::WindowSet& train, const RunConfig& cfg);

/// Population attack sets for the configured scenarios. population_same uses
/// every window of the primary dataset; population_different needs `attack`.
std::vector<attacks::AttackSet> population_sets(const windowing::WindowSet& primary_all,
                                                const std::string& primary_id,
                                                const windowing::WindowSet* attack,
                                                const std::string& attack_id,
                                                const RunConfig& cfg);

/// Scores every model on the user's test windows (FRR), the zero-effort set
/// and each population set. Population rows reuse the zero-effort FRR.
eval::EvalReport evaluate(const std::vector<UserModels>& users, const windowing::WindowSet& test,
                          const std::vector<attacks::AttackSet>& population, int jobs = 1);

/// Training-detail summary for the report's `users` section.
nlohmann::json user_details(const UserModels& u);

/// End to end on swipe-level feature sets. `attack` enables the
/// population_different scenario.
eval::EvalReport run_scenario_matrix(const features::FeatureSet& primary,
                                     const std::string& primary_id, Device device,
                                     const features::FeatureSet* attack,
                                     const std::string& attack_id, const RunConfig& cfg,
                                     std::vector<UserModels>* models_out = nullptr);

/// Union of two window sets per user (train then test).
windowing::WindowSet merge(const windowing::WindowSet& a, const windowing::WindowSet& b);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware threads).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace tcas::pipeline
