#include "tcas/svm.hpp"

#include <cmath>
#include <limits>

#include "tcas/errors.hpp"

namespace tcas::learners {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix kernel_matrix(const Matrix& A, const Matrix& B, Kernel kernel, double gamma) {
  Matrix K = A * B.transpose();
  if (kernel == Kernel::rbf) {
    const Vector a2 = A.rowwise().squaredNorm();
    const Vector b2 = B.rowwise().squaredNorm();
    for (Eigen::Index j = 0; j < K.cols(); ++j)
      for (Eigen::Index i = 0; i < K.rows(); ++i)
        K(i, j) = std::exp(-gamma * std::max(0.0, a2(i) + b2(j) - 2.0 * K(i, j)));
  }
  return K;
}

}  // namespace

double SvmModel::decision(const Eigen::Ref<const RowVector>& x) const {
  if (kernel == Kernel::linear) return w.dot(x) - rho;
  double f = 0;
  for (Eigen::Index i = 0; i < support.rows(); ++i)
    f += coef(i) * std::exp(-gamma * (support.row(i) - x).squaredNorm());
  return f - rho;
}

void SvmModel::finalize() {
  if (kernel == Kernel::linear) {
    w = RowVector::Zero(support.cols());
    for (Eigen::Index i = 0; i < support.rows(); ++i) w += coef(i) * support.row(i);
  }
}

SvmModel fit_svm(const Matrix& Z, const Eigen::VectorXi& labels, const SvmParams& p) {
  if (!(p.C > 0)) throw ConfigError("svm: C must be > 0");
  if (p.kernel == Kernel::rbf && !(p.gamma > 0)) throw ConfigError("svm: gamma must be > 0");
  const Eigen::Index n = Z.rows();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels(i) == 1 ? 1.0 : -1.0;

  const Matrix K = kernel_matrix(Z, Z, p.kernel, p.gamma);
  const Matrix Q = (y * y.transpose()).cwiseProduct(K);
  const Vector QD = Q.diagonal();
  const double C = p.C;

  Vector alpha = Vector::Zero(n);
  Vector G = Vector::Constant(n, -1.0);
  auto upper = [&](Eigen::Index t) { return alpha(t) >= C; };
  auto lower = [&](Eigen::Index t) { return alpha(t) <= 0; };

  const long max_iter = p.max_iter > 0 ? p.max_iter : std::max<long>(100000, 100 * n);
  SvmModel m;
  m.kernel = p.kernel;
  m.gamma = p.gamma;
  m.converged = false;
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    double gmax = -kInf, gmax2 = -kInf, obj_min = kInf;
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (!upper(t) && -G(t) >= gmax) { gmax = -G(t); i = t; }
      } else {
        if (!lower(t) && G(t) >= gmax) { gmax = G(t); i = t; }
      }
    }
    if (i < 0) { m.converged = true; break; }
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (lower(t)) continue;
        const double diff = gmax + G(t);
        gmax2 = std::max(gmax2, G(t));
        if (diff > 0) {
          double quad = QD(i) + QD(t) - 2.0 * y(i) * Q(i, t);
          const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
          if (obj <= obj_min) { j = t; obj_min = obj; }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - G(t);
        gmax2 = std::max(gmax2, -G(t));
        if (diff > 0) {
          double quad = QD(i) + QD(t) + 2.0 * y(i) * Q(i, t);
          const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
          if (obj <= obj_min) { j = t; obj_min = obj; }
        }
      }
    }
    if (gmax + gmax2 < p.tol || j < 0) { m.converged = true; break; }

    const double ai = alpha(i), aj = alpha(j);
    if (y(i) != y(j)) {
      double quad = QD(i) + QD(j) + 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-G(i) - G(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = -diff; }
      }
      if (diff > 0) {
        if (alpha(i) > C) { alpha(i) = C; alpha(j) = C - diff; }
      } else {
        if (alpha(j) > C) { alpha(j) = C; alpha(i) = C + diff; }
      }
    } else {
      double quad = QD(i) + QD(j) - 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (G(i) - G(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) { alpha(i) = C; alpha(j) = sum - C; }
      } else {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
      }
      if (sum > C) {
        if (alpha(j) > C) { alpha(j) = C; alpha(i) = sum - C; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
      }
    }
    const double dai = alpha(i) - ai, daj = alpha(j) - aj;
    G += Q.col(i) * dai + Q.col(j) * daj;
  }
  m.iterations = iter;

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0;
  long n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * G(t);
    if (upper(t)) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  m.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2;

  Eigen::Index n_sv = 0;
  for (Eigen::Index t = 0; t < n; ++t) n_sv += alpha(t) > 0;
  m.support.resize(n_sv, Z.cols());
  m.coef.resize(n_sv);
  Eigen::Index k = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0) {
      m.support.row(k) = Z.row(t);
      m.coef(k++) = alpha(t) * y(t);
    }
  }
  m.finalize();
  return m;
}

SvmParams svm_params_from_json(const nlohmann::json& j) {
  SvmParams p;
  p.C = j.value("C", p.C);
  const auto kernel = j.value("kernel", std::string("rbf"));
  if (kernel == "linear") p.kernel = Kernel::linear;
  else if (kernel == "rbf") p.kernel = Kernel::rbf;
  else throw ConfigError("svm: unknown kernel '" + kernel + "'");
  p.gamma = j.value("gamma", p.gamma);
  p.tol = j.value("tol", p.tol);
  p.max_iter = j.value("max_iter", p.max_iter);
  return p;
}

nlohmann::json to_json(const SvmModel& m) {
  std::vector<double> sv(m.support.data(), m.support.data() + m.support.size());
  std::vector<double> coef(m.coef.data(), m.coef.data() + m.coef.size());
  return {{"kernel", m.kernel == Kernel::linear ? "linear" : "rbf"},
          {"gamma", m.gamma},
          {"rho", m.rho},
          {"n_support", m.support.rows()},
          {"dim", m.support.cols()},
          {"support", sv},
          {"coef", coef},
          {"converged", m.converged},
          {"iterations", m.iterations}};
}

SvmModel svm_from_json(const nlohmann::json& j) {
  SvmModel m;
  try {
    m.kernel = j.at("kernel").get<std::string>() == "linear" ? Kernel::linear : Kernel::rbf;
    m.gamma = j.at("gamma").get<double>();
    m.rho = j.at("rho").get<double>();
    const auto n = j.at("n_support").get<Eigen::Index>();
    const auto d = j.at("dim").get<Eigen::Index>();
    auto sv = j.at("support").get<std::vector<double>>();
    auto coef = j.at("coef").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(sv.size()) != n * d || static_cast<Eigen::Index>(coef.size()) != n)
      throw CorruptModel("svm: support arrays have inconsistent shape");
    m.support = Eigen::Map<Matrix>(sv.data(), n, d);
    m.coef = Eigen::Map<Vector>(coef.data(), n);
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("svm: ") + e.what());
  }
  m.finalize();
  return m;
}

}  // namespace tcas::learners
