#include "tcas/nn.hpp"

#include <cmath>

#include "tcas/errors.hpp"

namespace tcas::nn {

namespace {

Matrix activate(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::identity: return z;
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::leaky_relu:
      return z.unaryExpr([](double v) { return v > 0 ? v : kLeakySlope * v; });
  }
  return z;
}

// d act / d z evaluated at z, multiplied elementwise by upstream.
Matrix activation_backward(const Matrix& z, const Matrix& upstream, Activation act) {
  switch (act) {
    case Activation::identity: return upstream;
    case Activation::tanh: {
      Matrix t = z.array().tanh().matrix();
      return (upstream.array() * (1.0 - t.array().square())).matrix();
    }
    case Activation::leaky_relu:
      return upstream.binaryExpr(z, [](double u, double v) { return v > 0 ? u : kLeakySlope * u; });
  }
  return upstream;
}

std::string act_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::leaky_relu: return "leaky_relu";
  }
  return "identity";
}

Activation act_from(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "tanh") return Activation::tanh;
  if (s == "leaky_relu") return Activation::leaky_relu;
  throw CorruptModel("unknown activation '" + s + "'");
}

}  // namespace

Vector Gradients::flatten() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < dW.size(); ++l) n += dW[l].size() + db[l].size();
  Vector out(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < dW.size(); ++l) {
    out.segment(k, dW[l].size()) = dW[l].reshaped();
    k += dW[l].size();
    out.segment(k, db[l].size()) = db[l];
    k += db[l].size();
  }
  return out;
}

Network::Network(const std::vector<int>& widths, const std::vector<Activation>& acts, Rng& rng) {
  if (widths.size() < 2 || acts.size() != widths.size() - 1)
    throw ConfigError("network: need one activation per layer");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l], out = widths[l + 1];
    if (in < 1 || out < 1) throw ConfigError("network: layer widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    Dense d;
    d.W.resize(out, in);
    for (Eigen::Index i = 0; i < d.W.size(); ++i) d.W.data()[i] = u(rng);
    d.b = Vector::Zero(out);
    d.act = acts[l];
    layers_.push_back(std::move(d));
  }
}

Matrix Network::forward(const Matrix& X) const {
  Matrix a = X;
  for (const auto& d : layers_) {
    Matrix z = a * d.W.transpose();
    z.rowwise() += d.b.transpose();
    a = activate(z, d.act);
  }
  return a;
}

Matrix Network::forward(const Matrix& X, Cache& cache) const {
  cache.inputs.clear();
  cache.pre.clear();
  Matrix a = X;
  for (const auto& d : layers_) {
    cache.inputs.push_back(a);
    Matrix z = a * d.W.transpose();
    z.rowwise() += d.b.transpose();
    a = activate(z, d.act);
    cache.pre.push_back(std::move(z));
  }
  return a;
}

Matrix Network::backward(const Cache& cache, const Matrix& d_out, Gradients* grads) const {
  Matrix delta = d_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& d = layers_[l];
    Matrix dz = activation_backward(cache.pre[l], delta, d.act);
    if (grads) {
      grads->dW[l] += dz.transpose() * cache.inputs[l];
      grads->db[l] += dz.colwise().sum().transpose();
    }
    delta = dz * d.W;
  }
  return delta;
}

Gradients Network::zero_gradients() const {
  Gradients g;
  for (const auto& d : layers_) {
    g.dW.push_back(Matrix::Zero(d.W.rows(), d.W.cols()));
    g.db.push_back(Vector::Zero(d.b.size()));
  }
  return g;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& d : layers_) n += static_cast<std::size_t>(d.W.size() + d.b.size());
  return n;
}

Vector Network::parameters() const {
  Gradients g;
  for (const auto& d : layers_) {
    g.dW.push_back(d.W);
    g.db.push_back(d.b);
  }
  return g.flatten();
}

void Network::set_parameters(const Vector& theta) {
  if (static_cast<std::size_t>(theta.size()) != parameter_count())
    throw DimensionMismatch("network: parameter vector has wrong length");
  Eigen::Index k = 0;
  for (auto& d : layers_) {
    d.W.reshaped() = theta.segment(k, d.W.size());
    k += d.W.size();
    d.b = theta.segment(k, d.b.size());
    k += d.b.size();
  }
}

MomentumSgd::MomentumSgd(const Network& net, double lr, double momentum, double l2)
    : lr_(lr), momentum_(momentum), l2_(l2), velocity_(net.zero_gradients()) {}

void MomentumSgd::step(Network& net, const Gradients& g) {
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    velocity_.dW[l] = momentum_ * velocity_.dW[l] - lr_ * (g.dW[l] + l2_ * layers[l].W);
    velocity_.db[l] = momentum_ * velocity_.db[l] - lr_ * g.db[l];
    layers[l].W += velocity_.dW[l];
    layers[l].b += velocity_.db[l];
  }
}

Adam::Adam(const Network& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(net.zero_gradients()), v_(net.zero_gradients()) {}

void Adam::step(Network& net, const Gradients& g) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].W, m_.dW[l], v_.dW[l], g.dW[l]);
    update(layers[l].b, m_.db[l], v_.db[l], g.db[l]);
  }
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

nlohmann::json to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& d : net.layers()) {
    std::vector<double> w(d.W.data(), d.W.data() + d.W.size());
    std::vector<double> b(d.b.data(), d.b.data() + d.b.size());
    layers.push_back({{"out", d.W.rows()}, {"in", d.W.cols()}, {"activation", act_name(d.act)},
                      {"W", w}, {"b", b}});
  }
  return layers;
}

Network network_from_json(const nlohmann::json& j) {
  Network net;
  try {
    for (const auto& l : j) {
      Dense d;
      const auto out = l.at("out").get<Eigen::Index>();
      const auto in = l.at("in").get<Eigen::Index>();
      auto w = l.at("W").get<std::vector<double>>();
      auto b = l.at("b").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != out * in ||
          static_cast<Eigen::Index>(b.size()) != out)
        throw CorruptModel("network layer has inconsistent shape");
      d.W = Eigen::Map<Matrix>(w.data(), out, in);
      d.b = Eigen::Map<Vector>(b.data(), out);
      d.act = act_from(l.at("activation").get<std::string>());
      net.layers().push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("network: ") + e.what());
  }
  if (net.layers().empty()) throw CorruptModel("network has no layers");
  return net;
}

}  // namespace tcas::nn
