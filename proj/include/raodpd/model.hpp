#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "raodpd/sample.hpp"

namespace raodpd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Quadrature grid for integrals of the form  int h(x) f_theta^c(x) dx:
// the integral is approximated by sum_i weights[i] * h(points[i]).
struct WeightedGrid {
  std::vector<double> points;
  std::vector<double> weights;
};

// A univariate parametric density family. Families provide the density,
// the likelihood score, and a quadrature grid against powers of their own
// density; everything else (information matrices, divergences, estimating
// functions) is generic. Instances are immutable and safe to share across
// threads.
class ModelFamily {
public:
  virtual ~ModelFamily() = default;

  virtual int dimension() const = 0;
  virtual bool valid(const VectorXd& theta) const = 0;

  virtual double log_density(double x, const VectorXd& theta) const = 0;
  double density(double x, const VectorXd& theta) const;

  // Likelihood score d/dtheta log f_theta(x).
  virtual VectorXd score(double x, const VectorXd& theta) const = 0;

  // Grid for  int h(x) f_theta^c(x) dx  with c > 0 and the requested number
  // of nodes. Exact for h = polynomial times the family's own kernel powers
  // when the family is normal.
  virtual WeightedGrid power_kernel_grid(const VectorXd& theta, double c,
                                         int nodes) const = 0;

  // Robust starting point for estimation (location/scale from median/MAD
  // for the shipped families).
  virtual VectorXd initial_guess(const Sample& sample) const = 0;

  // Componentwise perturbation magnitudes for multi-start schedules.
  virtual VectorXd start_perturbation(const VectorXd& theta) const;

  void require_valid(const VectorXd& theta) const;
};

// Bundle of the at-model information-type matrices:
//   J = int s s^T f^{beta+1},  K = int s s^T f^{2beta+1} - xi xi^T,
//   xi = int s f^{beta+1}.
struct InfoMatrices {
  MatrixXd J;
  MatrixXd K;
  VectorXd xi;
};

// Weighted likelihood score recentred by its model expectation:
//   u_beta(x, theta) = s_theta(x) f_theta^beta(x) - xi_beta(theta).
// The beta = 0 branch returns the plain score exactly.
VectorXd beta_score(double x, const VectorXd& theta, double beta,
                    const ModelFamily& family);

// Sample mean of the beta-score, the estimating function of the minimum
// divergence estimator.
VectorXd score_mean(const Sample& sample, const VectorXd& theta, double beta,
                    const ModelFamily& family);

// Population version: int u_beta(x, theta_eval) f_{theta_true}(x) dx.
// Vanishes at theta_eval = theta_true (unbiased estimating equation).
VectorXd population_score(const VectorXd& theta_eval, const VectorXd& theta_true,
                          double beta, const ModelFamily& family);

// J, K, xi at the model. Throws NumericError if J is not positive definite.
InfoMatrices info_matrices(const VectorXd& theta, double beta,
                           const ModelFamily& family);

// Empirical divergence objective
//   int f_theta^{beta+1} - (beta+1)/(beta n) sum_i f_theta^beta(X_i)
// for beta > 0; the beta = 0 limit is the negative mean log-likelihood.
double dpd_objective(const Sample& sample, const VectorXd& theta, double beta,
                     const ModelFamily& family);

// Density power divergence d_beta(f_{theta_g}, f_{theta_f}); the beta = 0
// branch is the Kullback-Leibler integral.
double dpd_divergence(const VectorXd& theta_g, const VectorXd& theta_f,
                      double beta, const ModelFamily& family);

// xi_beta(theta) = int s f^{beta+1}; exposed because estimating loops reuse
// it across observations. Returns the exact zero vector at beta = 0.
VectorXd score_recentering(const VectorXd& theta, double beta,
                           const ModelFamily& family);

namespace detail {
// Gauss-Hermite nodes/weights for int e^{-t^2} g(t) dt, cached per size.
const std::vector<std::pair<double, double>>& gauss_hermite(int n);

// Evaluate a grid integrand with the doubled-node refinement check: the
// result with `nodes` and `2*nodes` points must agree to 1e-10 (relative),
// otherwise NumericError is thrown.
double checked_integral(const ModelFamily& family, const VectorXd& theta,
                        double c, const std::function<double(double)>& h,
                        int nodes = 200);
}  // namespace detail

}  // namespace raodpd
