#include "raodpd/robustness.hpp"

#include <stdexcept>

#include "raodpd/distributions.hpp"
#include "raodpd/errors.hpp"
#include "raodpd/linalg.hpp"

namespace raodpd {

namespace {

void check_on_null(const VectorXd& theta, const Constraint& constraint) {
  const double tol = 1e-10 * (1.0 + theta.lpNorm<Eigen::Infinity>());
  if (constraint.m(theta).lpNorm<Eigen::Infinity>() > tol)
    throw std::invalid_argument("theta does not satisfy the null constraint");
}

}  // namespace

VectorXd if_mdpde(double y, const VectorXd& theta, double beta,
                  const ModelFamily& family) {
  const InfoMatrices info = info_matrices(theta, beta, family);
  return detail::spd_solve(info.J, beta_score(y, theta, beta, family), "J");
}

VectorXd if_rmdpde(double y, const VectorXd& theta, double beta,
                   const ModelFamily& family, const Constraint& constraint) {
  check_on_null(theta, constraint);
  // At the null the population score vanishes (Fisher consistency), so the
  // recentred form coincides with the unrestricted influence function.
  return if_mdpde(y, theta, beta, family);
}

double if2_simple(double y, const VectorXd& theta0, double beta,
                  const ModelFamily& family) {
  const InfoMatrices info = info_matrices(theta0, beta, family);
  const VectorXd u = beta_score(y, theta0, beta, family);
  return 2.0 * u.dot(detail::spd_solve(info.K, u, "K"));
}

double if2_composite(double y, const VectorXd& theta, double beta,
                     const ModelFamily& family, const Constraint& constraint) {
  check_on_null(theta, constraint);
  const VectorXd inf = if_rmdpde(y, theta, beta, family, constraint);
  const ProjectionMatrices proj =
      restricted_projection_matrices(theta, beta, family, constraint);
  const MatrixXd b =
      proj.Q.transpose() * info_matrices(theta, beta, family).K * proj.Q;
  const VectorXd q_if = proj.Q.transpose() * inf;
  return 2.0 * q_if.dot(detail::spd_solve(b, q_if, "Q^T K Q"));
}

double noncentrality_simple(const VectorXd& theta0, const VectorXd& d, double beta,
                            const ModelFamily& family) {
  if (d.size() != family.dimension())
    throw std::invalid_argument("noncentrality_simple: bad drift dimension");
  const InfoMatrices info = info_matrices(theta0, beta, family);
  const VectorXd jd = info.J * d;
  return jd.dot(detail::spd_solve(info.K, jd, "K"));
}

double noncentrality_contaminated(const VectorXd& theta0,
                                  const ContaminationSpec& spec, double beta,
                                  const ModelFamily& family) {
  if (spec.epsilon < 0.0)
    throw std::invalid_argument("contamination mass must be >= 0");
  VectorXd d = spec.d.size() == 0 ? VectorXd::Zero(family.dimension()).eval()
                                  : spec.d;
  if (spec.epsilon > 0.0)
    d += spec.epsilon * if_mdpde(spec.y, theta0, beta, family);
  return noncentrality_simple(theta0, d, beta, family);
}

double noncentrality_composite(const VectorXd& theta,
                               const ContaminationSpec& spec, double beta,
                               const ModelFamily& family,
                               const Constraint& constraint) {
  if (spec.epsilon < 0.0)
    throw std::invalid_argument("contamination mass must be >= 0");
  check_on_null(theta, constraint);
  VectorXd d = spec.d.size() == 0 ? VectorXd::Zero(family.dimension()).eval()
                                  : spec.d;
  if (spec.epsilon > 0.0)
    d += spec.epsilon * if_mdpde(spec.y, theta, beta, family);

  const InfoMatrices info = info_matrices(theta, beta, family);
  const ProjectionMatrices proj =
      restricted_projection_matrices(theta, beta, family, constraint);
  const MatrixXd b = proj.Q.transpose() * info.K * proj.Q;
  const VectorXd qjd = proj.Q.transpose() * (info.J * d);
  return qjd.dot(detail::spd_solve(b, qjd, "Q^T K Q"));
}

double contiguous_power(int df, double noncentrality, double alpha) {
  if (noncentrality < 0.0)
    throw std::invalid_argument("contiguous_power: noncentrality must be >= 0");
  return noncentral_chi2_survival(chi2_quantile(alpha, df),
                                  ChiSqSpec{df, noncentrality});
}

double pif_simple(double y, const VectorXd& theta0, const VectorXd& d, double beta,
                  const ModelFamily& family, double alpha) {
  const int p = family.dimension();
  const double delta = noncentrality_simple(theta0, d, beta, family);
  const double coeff = pif_series(delta, p, chi2_quantile(alpha, p));
  const InfoMatrices info = info_matrices(theta0, beta, family);
  const VectorXd u = beta_score(y, theta0, beta, family);
  return coeff * (info.J * d).dot(detail::spd_solve(info.K, u, "K"));
}

double pif_composite(double y, const VectorXd& theta, const VectorXd& d,
                     double beta, const ModelFamily& family,
                     const Constraint& constraint, double alpha) {
  check_on_null(theta, constraint);
  ContaminationSpec clean;
  clean.d = d;
  const double delta =
      noncentrality_composite(theta, clean, beta, family, constraint);
  const int r = constraint.r;
  const double coeff = pif_series(delta, r, chi2_quantile(alpha, r));

  const InfoMatrices info = info_matrices(theta, beta, family);
  const ProjectionMatrices proj =
      restricted_projection_matrices(theta, beta, family, constraint);
  const MatrixXd b = proj.Q.transpose() * info.K * proj.Q;
  const VectorXd u = beta_score(y, theta, beta, family);
  const VectorXd qjd = proj.Q.transpose() * (info.J * d);
  const VectorXd qu = proj.Q.transpose() * u;
  return coeff * qjd.dot(detail::spd_solve(b, qu, "Q^T K Q"));
}

double lif_simple() { return 0.0; }
double lif_composite() { return 0.0; }

}  // namespace raodpd
