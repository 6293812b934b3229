#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "tcas/ensemble.hpp"
#include "tcas/features.hpp"
#include "tcas/mlp.hpp"
#include "tcas/svm.hpp"

namespace tcas::learners {

enum class Algorithm { svm, random_forest, mlp, gbt };

inline constexpr std::array<Algorithm, 4> kAlgorithms = {Algorithm::svm, Algorithm::random_forest,
                                                         Algorithm::mlp, Algorithm::gbt};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);  // throws ConfigError

inline constexpr int kModelSchemaVersion = 1;

/// A trained verifier. svm and mlp see standardized inputs; the scaler is
/// empty for the tree learners.
struct ClassifierModel {
  Algorithm algorithm = Algorithm::svm;
  nlohmann::json hyperparams = nlohmann::json::object();
  features::Standardizer scaler;
  std::variant<SvmModel, ForestModel, MlpModel, GbtModel> state;
  Eigen::Index dims = 0;
  std::uint64_t seed = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

/// y holds 1 for genuine and 0 for impostor rows. Throws DegenerateLabels on
/// a single class and DataError on non-finite inputs.
ClassifierModel train(Algorithm algorithm, const Matrix& X, const Eigen::VectorXi& y,
                      const nlohmann::json& hyperparams, std::uint64_t seed);

/// Probability-like genuine score in [0, 1].
double predict_score(const ClassifierModel& m, const Eigen::Ref<const RowVector>& x);
Vector predict_scores(const ClassifierModel& m, const Matrix& X);

inline int predict_label(const ClassifierModel& m, const Eigen::Ref<const RowVector>& x) {
  return predict_score(m, x) >= 0.5 ? 1 : 0;
}

nlohmann::json to_json(const ClassifierModel& m);
ClassifierModel model_from_json(const nlohmann::json& j);

void save_model(const ClassifierModel& m, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

/// `<user>_<algo>_<vanilla|gan>.model.json`
std::string model_filename(std::string_view user, Algorithm a, std::string_view mode);

nlohmann::json to_json(const features::Standardizer& s);
features::Standardizer standardizer_from_json(const nlohmann::json& j);

}  // namespace tcas::learners
