#include "tcas/classifier.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "tcas/errors.hpp"

namespace tcas::learners {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::svm: return "svm";
    case Algorithm::random_forest: return "random_forest";
    case Algorithm::mlp: return "mlp";
    case Algorithm::gbt: return "gbt";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  for (auto a : kAlgorithms)
    if (to_string(a) == s) return a;
  throw ConfigError("unknown algorithm '" + std::string(s) +
                    "' (expected svm, random_forest, mlp or gbt)");
}

namespace {

bool uses_scaler(Algorithm a) { return a == Algorithm::svm || a == Algorithm::mlp; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

ClassifierModel train(Algorithm algorithm, const Matrix& X, const Eigen::VectorXi& y,
                      const nlohmann::json& hyperparams, std::uint64_t seed) {
  if (X.rows() != y.size()) throw DimensionMismatch("train: X and y have different lengths");
  if (X.rows() == 0) throw InsufficientData("train: no samples");
  if (!X.allFinite()) throw DataError("train: non-finite feature values");
  const auto pos = (y.array() == 1).count();
  const auto neg = (y.array() == 0).count();
  if (pos + neg != y.size()) throw DataError("train: labels must be 0 or 1");
  if (pos == 0 || neg == 0) throw DegenerateLabels("train: labels contain a single class");

  ClassifierModel m;
  m.algorithm = algorithm;
  m.hyperparams = hyperparams;
  m.dims = X.cols();
  m.seed = seed;
  Matrix Z;
  if (uses_scaler(algorithm)) {
    m.scaler = features::Standardizer::fit(X);
    Z = m.scaler.transform(X);
  }
  try {
    switch (algorithm) {
      case Algorithm::svm: {
        auto fit = fit_svm(Z, y, svm_params_from_json(hyperparams));
        if (!fit.converged) m.metadata["warnings"].push_back("ConvergenceWarning: svm iteration cap reached");
        m.state = std::move(fit);
        break;
      }
      case Algorithm::random_forest:
        m.state = fit_forest(X, y, forest_params_from_json(hyperparams), seed);
        break;
      case Algorithm::mlp:
        m.state = fit_mlp(Z, y, mlp_params_from_json(hyperparams), seed);
        break;
      case Algorithm::gbt:
        m.state = fit_gbt(X, y, gbt_params_from_json(hyperparams));
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(to_string(algorithm)) + " hyperparameters: " + e.what());
  }
  return m;
}

double predict_score(const ClassifierModel& m, const Eigen::Ref<const RowVector>& x) {
  if (x.size() != m.dims)
    throw DimensionMismatch("predict: expected " + std::to_string(m.dims) + " features, got " +
                            std::to_string(x.size()));
  return std::visit(
      overloaded{
          [&](const SvmModel& s) { return nn::sigmoid(s.decision(m.scaler.transform(x))); },
          [&](const ForestModel& f) { return f.score(x); },
          [&](const MlpModel& n) { return nn::sigmoid(n.logit(m.scaler.transform(x))); },
          [&](const GbtModel& g) { return nn::sigmoid(g.margin(x)); }},
      m.state);
}

Vector predict_scores(const ClassifierModel& m, const Matrix& X) {
  Vector s(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) s(i) = predict_score(m, X.row(i));
  return s;
}

nlohmann::json to_json(const features::Standardizer& s) {
  if (s.empty()) return nullptr;
  return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"stddev", std::vector<double>(s.stddev.data(), s.stddev.data() + s.stddev.size())},
          {"constant", s.constant}};
}

features::Standardizer standardizer_from_json(const nlohmann::json& j) {
  features::Standardizer s;
  if (j.is_null()) return s;
  auto mean = j.at("mean").get<std::vector<double>>();
  auto sd = j.at("stddev").get<std::vector<double>>();
  s.constant = j.at("constant").get<std::vector<bool>>();
  if (sd.size() != mean.size() || s.constant.size() != mean.size())
    throw CorruptModel("standardizer arrays have inconsistent lengths");
  s.mean = Eigen::Map<RowVector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  s.stddev = Eigen::Map<RowVector>(sd.data(), static_cast<Eigen::Index>(sd.size()));
  return s;
}

nlohmann::json to_json(const ClassifierModel& m) {
  nlohmann::json state = std::visit(
      overloaded{[](const SvmModel& s) { return to_json(s); },
                 [](const ForestModel& f) { return to_json(f); },
                 [](const MlpModel& n) { return nn::to_json(n.net); },
                 [](const GbtModel& g) { return to_json(g); }},
      m.state);
  return {{"schema_version", kModelSchemaVersion},
          {"algorithm", to_string(m.algorithm)},
          {"dims", m.dims},
          {"seed", m.seed},
          {"hyperparams", m.hyperparams},
          {"scaler", to_json(m.scaler)},
          {"metadata", m.metadata},
          {"state", state}};
}

ClassifierModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw CorruptModel("model document has no schema_version");
  if (!j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != kModelSchemaVersion)
    throw SchemaVersionError("unsupported model schema_version " + j.at("schema_version").dump() +
                             " (expected " + std::to_string(kModelSchemaVersion) + ")");
  ClassifierModel m;
  try {
    m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    m.dims = j.at("dims").get<Eigen::Index>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.hyperparams = j.at("hyperparams");
    m.scaler = standardizer_from_json(j.at("scaler"));
    m.metadata = j.at("metadata");
    const auto& st = j.at("state");
    switch (m.algorithm) {
      case Algorithm::svm: m.state = svm_from_json(st); break;
      case Algorithm::random_forest: m.state = forest_from_json(st); break;
      case Algorithm::mlp: m.state = MlpModel{nn::network_from_json(st)}; break;
      case Algorithm::gbt: m.state = gbt_from_json(st); break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("model: ") + e.what());
  } catch (const ConfigError& e) {
    throw CorruptModel(std::string("model: ") + e.what());
  }
  if (uses_scaler(m.algorithm) && m.scaler.mean.size() != m.dims)
    throw CorruptModel("model: scaler width does not match dims");
  return m;
}

void save_model(const ClassifierModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file " + path.string());
  out << to_json(m).dump() << '\n';
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

std::string model_filename(std::string_view user, Algorithm a, std::string_view mode) {
  return std::string(user) + "_" + std::string(to_string(a)) + "_" + std::string(mode) +
         ".model.json";
}

}  // namespace tcas::learners
