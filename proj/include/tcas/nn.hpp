#pragma once

// Fully connected feed-forward networks with reverse-mode gradients.
// Samples are rows: a layer maps A (batch x in) to act(A W^T + 1 b^T).

#include <vector>

#include <json.hpp>

#include "tcas/seeding.hpp"
#include "tcas/types.hpp"

namespace tcas::nn {

enum class Activation { identity, tanh, leaky_relu };

inline constexpr double kLeakySlope = 0.2;

struct Dense {
  Matrix W;  // out x in
  Vector b;  // out
  Activation act = Activation::identity;
};

struct Gradients {
  std::vector<Matrix> dW;
  std::vector<Vector> db;

  Vector flatten() const;
};

class Network {
 public:
  Network() = default;

  /// widths = {in, hidden..., out}; one activation per layer. Glorot-uniform
  /// weights, zero biases.
  Network(const std::vector<int>& widths, const std::vector<Activation>& acts, Rng& rng);

  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  Matrix forward(const Matrix& X) const;
  Matrix forward(const Matrix& X, Cache& cache) const;

  /// Backpropagates dL/d(output) through the cached pass. Accumulates into
  /// `grads` when non-null and returns dL/d(input).
  Matrix backward(const Cache& cache, const Matrix& d_out, Gradients* grads) const;

  Gradients zero_gradients() const;

  std::size_t parameter_count() const;
  Vector parameters() const;
  void set_parameters(const Vector& theta);

  int input_dim() const { return static_cast<int>(layers_.front().W.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().W.rows()); }

  std::vector<Dense>& layers() { return layers_; }
  const std::vector<Dense>& layers() const { return layers_; }

 private:
  std::vector<Dense> layers_;
};

/// Momentum SGD; L2 decay applies to weights only.
class MomentumSgd {
 public:
  MomentumSgd(const Network& net, double lr, double momentum, double l2);
  void step(Network& net, const Gradients& g);

 private:
  double lr_, momentum_, l2_;
  Gradients velocity_;
};

class Adam {
 public:
  Adam(const Network& net, double lr, double beta1 = 0.5, double beta2 = 0.999,
       double eps = 1e-8);
  void step(Network& net, const Gradients& g);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Gradients m_, v_;
};

/// Numerically stable log(1 + e^x).
double softplus(double x);
double sigmoid(double x);

nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

}  // namespace tcas::nn
