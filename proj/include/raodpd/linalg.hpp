#pragma once

#include <Eigen/Dense>

namespace raodpd::detail {

// Inverse / solve for symmetric positive definite matrices with a
// condition-number guard: warns (stderr) above 1e12, throws NumericError
// above 1e15 or when the matrix is not positive definite.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a, const char* what);
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const char* what);

}  // namespace raodpd::detail
