#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "raodpd/model.hpp"
#include "raodpd/sample.hpp"

namespace raodpd {

// Null-hypothesis restriction m(theta) = 0_r with p x r Jacobian M(theta)
// (columns are the gradients of the individual restrictions).
struct Constraint {
  enum class Kind { FixedSubset, General };

  int r = 0;
  Kind kind = Kind::General;
  std::function<VectorXd(const VectorXd&)> m;
  std::function<MatrixXd(const VectorXd&)> jacobian;
  // FixedSubset only: the pinned coordinates and their values.
  std::vector<int> fixed_indices;
  VectorXd fixed_values;

  // Pin theta[indices[i]] = values[i]; solved by direct elimination.
  static Constraint fix_components(std::vector<int> indices, VectorXd values,
                                   int dimension);
  static Constraint general(int r, std::function<VectorXd(const VectorXd&)> m,
                            std::function<MatrixXd(const VectorXd&)> jacobian);
};

struct SolverOptions {
  double tolerance = 1e-8;  // scaled estimating-equation residual
  int max_iterations = 200;
  bool multistart = true;
};

struct EstimateReport {
  VectorXd theta_hat;
  double objective_value = 0.0;
  bool converged = false;
  int iterations = 0;
  MatrixXd asymptotic_cov;
};

// Unrestricted minimum divergence estimate at tuning beta; beta = 0 is the
// MLE. Among the stationary points located from the multi-start schedule
// the one with the smallest objective is returned. Non-convergence is
// reported through the flag, never silently.
EstimateReport mdpde(const Sample& sample, double beta, const ModelFamily& family,
                     const VectorXd& init, const SolverOptions& options = {});

// Restricted estimate under m(theta) = 0. `init` must be feasible. The
// asymptotic covariance of the restricted estimator is P K P.
EstimateReport rmdpde(const Sample& sample, double beta, const ModelFamily& family,
                      const Constraint& constraint, const VectorXd& init,
                      const SolverOptions& options = {});

// Sandwich covariance J^{-1} K J^{-1} of the unrestricted estimator.
MatrixXd asymptotic_cov_unrestricted(const VectorXd& theta, double beta,
                                     const ModelFamily& family);

struct ProjectionMatrices {
  MatrixXd P;      // p x p
  MatrixXd Q;      // p x r
  MatrixXd Sigma;  // p x p, P K P
};

// Q = J^{-1} M [M^T J^{-1} M]^{-1},  P = J^{-1} - Q M^T J^{-1}; satisfies
// M^T Q = I_r.
ProjectionMatrices restricted_projection_matrices(const VectorXd& theta,
                                                  double beta,
                                                  const ModelFamily& family,
                                                  const Constraint& constraint);

namespace detail {
// Scale-free residual: estimating-equation components in units of the
// at-model score standard deviation sqrt(diag(K)).
double scaled_residual(const VectorXd& score, const MatrixXd& k_matrix);
}  // namespace detail

}  // namespace raodpd
