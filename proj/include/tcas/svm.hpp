#pragma once

#include <json.hpp>

#include "tcas/types.hpp"

namespace tcas::learners {

enum class Kernel { linear, rbf };

struct SvmParams {
  double C = 1.0;
  Kernel kernel = Kernel::rbf;
  double gamma = 0.1;
  double tol = 1e-3;
  long max_iter = 0;  // 0 = max(100000, 100 n)
};

/// C-SVC solved in the dual with second-order working-set selection.
struct SvmModel {
  Kernel kernel = Kernel::rbf;
  double gamma = 0;
  Matrix support;  // support vectors, one per row
  Vector coef;     // alpha_i * y_i
  double rho = 0;
  RowVector w;     // primal weights, linear kernel only
  bool converged = true;
  long iterations = 0;

  /// sum_i coef_i K(sv_i, x) - rho; positive means genuine.
  double decision(const Eigen::Ref<const RowVector>& x) const;
  void finalize();  // rebuilds derived state (w) from support/coef
};

/// y holds 0/1 labels; rows of Z are (already standardized) samples.
SvmModel fit_svm(const Matrix& Z, const Eigen::VectorXi& y, const SvmParams& p);

SvmParams svm_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SvmModel& m);
SvmModel svm_from_json(const nlohmann::json& j);

}  // namespace tcas::learners
