#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "tcas/nn.hpp"

namespace tcas::learners {

struct MlpParams {
  std::vector<int> hidden = {32};
  double learning_rate = 1e-2;
  double momentum = 0.9;
  double l2 = 1e-4;
  int epochs = 60;
  int batch_size = 32;
};

/// tanh hidden layers, one logistic output unit.
struct MlpModel {
  nn::Network net;

  double logit(const Eigen::Ref<const RowVector>& z) const;
};

MlpModel fit_mlp(const Matrix& Z, const Eigen::VectorXi& y, const MlpParams& p,
                 std::uint64_t seed);

/// Mean binary cross-entropy of the logistic output plus (l2/2)||W||^2, and
/// its gradient with respect to Network::parameters().
std::pair<double, Vector> mlp_loss_and_gradient(const nn::Network& net, const Matrix& Z,
                                                const Eigen::VectorXi& y, double l2);

nn::Network make_mlp_network(int inputs, const std::vector<int>& hidden, std::uint64_t seed);

MlpParams mlp_params_from_json(const nlohmann::json& j);

}  // namespace tcas::learners
