#include "raodpd/linalg.hpp"

#include <iostream>
#include <string>

#include "raodpd/errors.hpp"

namespace raodpd::detail {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> guarded_decomposition(
    const Eigen::MatrixXd& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw NumericError(std::string(what) + ": eigendecomposition failed");
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0))
    throw NumericError(std::string(what) + ": matrix not positive definite");
  const double cond = lmax / lmin;
  if (cond > 1e15)
    throw NumericError(std::string(what) + ": condition number above 1e15");
  if (cond > 1e12)
    std::cerr << "raodpd: warning: " << what << ": condition number " << cond
              << " above 1e12\n";
  return es;
}

}  // namespace

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a, const char* what) {
  const auto es = guarded_decomposition(a, what);
  return es.eigenvectors() *
         es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const char* what) {
  const auto es = guarded_decomposition(a, what);
  return es.eigenvectors() *
         (es.eigenvalues().cwiseInverse().asDiagonal() *
          (es.eigenvectors().transpose() * b));
}

}  // namespace raodpd::detail
