#pragma once

#include <Eigen/Dense>

#include "raodpd/estimation.hpp"
#include "raodpd/model.hpp"

namespace raodpd {

// Point-mass contamination of weight epsilon at y, combined with a
// contiguous drift direction d (zero d probes the level).
struct ContaminationSpec {
  double epsilon = 0.0;
  double y = 0.0;
  VectorXd d;
};

// Influence function of the unrestricted estimator: J^{-1} u_beta(y, theta).
VectorXd if_mdpde(double y, const VectorXd& theta, double beta,
                  const ModelFamily& family);

// Influence function of the restricted estimator evaluated at the null
// (theta must satisfy the constraint); identical to if_mdpde there.
VectorXd if_rmdpde(double y, const VectorXd& theta, double beta,
                   const ModelFamily& family, const Constraint& constraint);

// Second-order influence function of the simple-null test functional:
//   2 u_beta^T K^{-1} u_beta.
double if2_simple(double y, const VectorXd& theta0, double beta,
                  const ModelFamily& family);

// Composite counterpart: 2 IF^T Q [Q^T K Q]^{-1} Q^T IF at theta in Theta0.
double if2_composite(double y, const VectorXd& theta, double beta,
                     const ModelFamily& family, const Constraint& constraint);

// Contiguous-alternative noncentrality d^T J K^{-1} J d.
double noncentrality_simple(const VectorXd& theta0, const VectorXd& d, double beta,
                            const ModelFamily& family);

// Same quadratic form at the contamination-shifted drift
// d + epsilon * IF(y).
double noncentrality_contaminated(const VectorXd& theta0,
                                  const ContaminationSpec& spec, double beta,
                                  const ModelFamily& family);

// Composite-test noncentrality
//   delta^T J Q [Q^T K Q]^{-1} Q^T J delta at the shifted drift.
double noncentrality_composite(const VectorXd& theta,
                               const ContaminationSpec& spec, double beta,
                               const ModelFamily& family,
                               const Constraint& constraint);

// Asymptotic power of the chi-square test with the given noncentrality:
// noncentral survival of the central alpha-quantile. Returns alpha at 0.
double contiguous_power(int df, double noncentrality, double alpha);

// Power influence function of the simple test:
//   C_p(delta_beta(theta0, d)) * d^T J K^{-1} u_beta(y, theta0).
double pif_simple(double y, const VectorXd& theta0, const VectorXd& d, double beta,
                  const ModelFamily& family, double alpha);

// Composite version with the projected forms (series at df = r).
double pif_composite(double y, const VectorXd& theta, const VectorXd& d,
                     double beta, const ModelFamily& family,
                     const Constraint& constraint, double alpha);

// Level influence functions vanish identically for both tests: the level
// perturbation is quadratic in the contamination mass.
double lif_simple();
double lif_composite();

}  // namespace raodpd
