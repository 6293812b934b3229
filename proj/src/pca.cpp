#include <Eigen/Eigenvalues>

#include "tcas/eval.hpp"

namespace tcas::eval {

Pca pca_top2(const Matrix& X, bool strict) {
  if (X.rows() < 3) throw InsufficientData("pca needs at least 3 rows");
  if (X.cols() < 2) throw DimensionMismatch("pca needs at least 2 columns");
  Pca p;
  p.mean = X.colwise().mean();
  const Matrix C = X.rowwise() - p.mean;
  const Matrix cov = (C.transpose() * C) / static_cast<double>(X.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const Vector& ev = es.eigenvalues();  // ascending
  const Eigen::Index d = ev.size();
  const double top = std::max(0.0, ev(d - 1));
  const double tol = std::max(1e-12, top * 1e-10 * static_cast<double>(d));
  p.rank = static_cast<int>((ev.array() > tol).count());

  p.components.resize(2, d);
  p.explained.resize(2);
  for (int k = 0; k < 2; ++k) {
    Vector c = es.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    c.cwiseAbs().maxCoeff(&arg);
    if (c(arg) < 0) c = -c;
    p.components.row(k) = c.transpose();
    p.explained(k) = std::max(0.0, ev(d - 1 - k));
  }
  if (p.rank < 2) {
    p.degenerate = true;
    p.warnings.push_back("covariance rank " + std::to_string(p.rank) +
                         " < 2; second component is arbitrary");
    if (strict) throw DegenerateData(p.warnings.back());
  }
  p.projected = C * p.components.transpose();
  return p;
}

}  // namespace tcas::eval
