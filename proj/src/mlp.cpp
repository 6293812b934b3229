#include "tcas/mlp.hpp"

#include <algorithm>
#include <numeric>

#include "tcas/errors.hpp"

namespace tcas::learners {

double MlpModel::logit(const Eigen::Ref<const RowVector>& z) const {
  return net.forward(Matrix(z))(0, 0);
}

nn::Network make_mlp_network(int inputs, const std::vector<int>& hidden, std::uint64_t seed) {
  std::vector<int> widths = {inputs};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  std::vector<nn::Activation> acts(hidden.size(), nn::Activation::tanh);
  acts.push_back(nn::Activation::identity);
  Rng rng(seed);
  return nn::Network(widths, acts, rng);
}

namespace {

// Loss over a batch and its gradient; `grads` receives the data term only.
double batch_loss(const nn::Network& net, const Matrix& Z, const Vector& y, nn::Gradients& grads) {
  nn::Network::Cache cache;
  const Matrix logits = net.forward(Z, cache);
  const auto m = static_cast<double>(Z.rows());
  double loss = 0;
  Matrix d(Z.rows(), 1);
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const double l = logits(i, 0);
    // y log s(l) + (1-y) log(1-s(l)) = -(y softplus(-l) + (1-y) softplus(l))
    loss += y(i) * nn::softplus(-l) + (1.0 - y(i)) * nn::softplus(l);
    d(i, 0) = (nn::sigmoid(l) - y(i)) / m;
  }
  net.backward(cache, d, &grads);
  return loss / m;
}

}  // namespace

std::pair<double, Vector> mlp_loss_and_gradient(const nn::Network& net, const Matrix& Z,
                                                const Eigen::VectorXi& y, double l2) {
  auto grads = net.zero_gradients();
  double loss = batch_loss(net, Z, y.cast<double>(), grads);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& W = net.layers()[l].W;
    loss += 0.5 * l2 * W.squaredNorm();
    grads.dW[l] += l2 * W;
  }
  return {loss, grads.flatten()};
}

MlpModel fit_mlp(const Matrix& Z, const Eigen::VectorXi& labels, const MlpParams& p,
                 std::uint64_t seed) {
  if (p.hidden.empty() || p.epochs < 1 || p.batch_size < 1 || !(p.learning_rate > 0))
    throw ConfigError("mlp: need hidden layers, epochs >= 1, batch_size >= 1, learning_rate > 0");
  MlpModel m;
  m.net = make_mlp_network(static_cast<int>(Z.cols()), p.hidden, seed);
  nn::MomentumSgd opt(m.net, p.learning_rate, p.momentum, p.l2);
  const Vector y = labels.cast<double>();

  Rng rng(seed ^ 0x5bd1e995ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(Z.rows()));
  std::iota(order.begin(), order.end(), 0);
  const auto bs = static_cast<std::size_t>(p.batch_size);
  Matrix Zb;
  Vector yb;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const auto rows = static_cast<Eigen::Index>(end - start);
      Zb.resize(rows, Z.cols());
      yb.resize(rows);
      for (Eigen::Index r = 0; r < rows; ++r) {
        Zb.row(r) = Z.row(order[start + static_cast<std::size_t>(r)]);
        yb(r) = y(order[start + static_cast<std::size_t>(r)]);
      }
      auto grads = m.net.zero_gradients();
      batch_loss(m.net, Zb, yb, grads);
      opt.step(m.net, grads);
    }
  }
  return m;
}

MlpParams mlp_params_from_json(const nlohmann::json& j) {
  MlpParams p;
  if (j.contains("hidden")) {
    const auto& h = j.at("hidden");
    p.hidden = h.is_array() ? h.get<std::vector<int>>() : std::vector<int>{h.get<int>()};
  }
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.momentum = j.value("momentum", p.momentum);
  p.l2 = j.value("l2", p.l2);
  p.epochs = j.value("epochs", p.epochs);
  p.batch_size = j.value("batch_size", p.batch_size);
  return p;
}

}  // namespace tcas::learners
