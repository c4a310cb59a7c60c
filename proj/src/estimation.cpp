#include "raodpd/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "raodpd/errors.hpp"
#include "raodpd/linalg.hpp"

namespace raodpd {

Constraint Constraint::fix_components(std::vector<int> indices, VectorXd values,
                                      int dimension) {
  if (indices.empty() || static_cast<int>(indices.size()) > dimension)
    throw std::invalid_argument("Constraint: bad subset size");
  if (static_cast<int>(indices.size()) != values.size())
    throw std::invalid_argument("Constraint: indices/values size mismatch");
  for (int idx : indices)
    if (idx < 0 || idx >= dimension)
      throw std::invalid_argument("Constraint: index out of range");

  Constraint c;
  c.r = static_cast<int>(indices.size());
  c.kind = Kind::FixedSubset;
  c.fixed_indices = indices;
  c.fixed_values = values;
  c.m = [indices, values](const VectorXd& theta) {
    VectorXd out(indices.size());
    for (size_t i = 0; i < indices.size(); ++i)
      out[static_cast<int>(i)] = theta[indices[i]] - values[static_cast<int>(i)];
    return out;
  };
  const int p = dimension;
  c.jacobian = [indices, p](const VectorXd&) {
    MatrixXd jac = MatrixXd::Zero(p, static_cast<int>(indices.size()));
    for (size_t i = 0; i < indices.size(); ++i)
      jac(indices[i], static_cast<int>(i)) = 1.0;
    return jac;
  };
  return c;
}

Constraint Constraint::general(int r, std::function<VectorXd(const VectorXd&)> m,
                               std::function<MatrixXd(const VectorXd&)> jacobian) {
  if (r < 1) throw std::invalid_argument("Constraint: r must be >= 1");
  Constraint c;
  c.r = r;
  c.kind = Kind::General;
  c.m = std::move(m);
  c.jacobian = std::move(jacobian);
  return c;
}

namespace detail {

double scaled_residual(const VectorXd& score, const MatrixXd& k_matrix) {
  double worst = 0.0;
  for (int j = 0; j < score.size(); ++j) {
    const double scale = std::sqrt(std::max(k_matrix(j, j), 1e-300));
    worst = std::max(worst, std::fabs(score[j]) / scale);
  }
  return worst;
}

}  // namespace detail

namespace {

struct Attempt {
  VectorXd theta;
  bool converged = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
};

// Estimating-function values restricted to the free coordinates.
VectorXd free_score(const Sample& sample, double beta, const ModelFamily& family,
                    const VectorXd& theta, const std::vector<int>& free_idx) {
  const VectorXd u = score_mean(sample, theta, beta, family);
  VectorXd uf(free_idx.size());
  for (size_t a = 0; a < free_idx.size(); ++a)
    uf[static_cast<int>(a)] = u[free_idx[a]];
  return uf;
}

// Central-difference Jacobian of the free-coordinate estimating function;
// falls back to one-sided steps at the edge of the valid set.
MatrixXd fd_score_jacobian(const Sample& sample, double beta,
                           const ModelFamily& family, const VectorXd& theta,
                           const std::vector<int>& free_idx) {
  const int nf = static_cast<int>(free_idx.size());
  MatrixXd jac(nf, nf);
  for (int a = 0; a < nf; ++a) {
    const int j = free_idx[a];
    const double h = 1e-6 * (1.0 + std::fabs(theta[j]));
    VectorXd up = theta, dn = theta;
    up[j] += h;
    dn[j] -= h;
    if (!family.valid(dn)) dn = theta;
    if (!family.valid(up)) up = theta;
    const double width = up[j] - dn[j];
    jac.col(a) = (free_score(sample, beta, family, up, free_idx) -
                  free_score(sample, beta, family, dn, free_idx)) /
                 width;
  }
  return jac;
}

// Damped Newton on the estimating equation over the free coordinates. The
// at-model J serves as the fallback direction when the empirical Jacobian
// is unusable (it can be, off the model). Steps are accepted when either
// the divergence objective or the score norm decreases.
Attempt solve_scoring(const Sample& sample, double beta, const ModelFamily& family,
                      VectorXd theta, const std::vector<int>& free_idx,
                      const SolverOptions& options) {
  Attempt out;
  const int nf = static_cast<int>(free_idx.size());
  double obj = dpd_objective(sample, theta, beta, family);

  auto residual_of = [&](const VectorXd& th, const VectorXd& uf) {
    const InfoMatrices info = info_matrices(th, beta, family);
    MatrixXd kf(nf, nf);
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b)
        kf(a, b) = info.K(free_idx[a], free_idx[b]);
    return detail::scaled_residual(uf, kf);
  };

  auto newton_step = [&](const VectorXd& th,
                         const VectorXd& uf) -> VectorXd {
    const MatrixXd jac = fd_score_jacobian(sample, beta, family, th, free_idx);
    Eigen::FullPivLU<MatrixXd> lu(jac);
    if (lu.isInvertible()) {
      const VectorXd step = -lu.solve(uf);
      if (step.allFinite()) return step;
    }
    const InfoMatrices info = info_matrices(th, beta, family);
    MatrixXd jf(nf, nf);
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b)
        jf(a, b) = info.J(free_idx[a], free_idx[b]);
    return raodpd::detail::spd_solve(jf, uf, "scoring step");
  };

  VectorXd uf = free_score(sample, beta, family, theta, free_idx);
  for (int it = 0; it < options.max_iterations; ++it) {
    out.residual = residual_of(theta, uf);
    out.iterations = it;
    if (out.residual < options.tolerance) {
      // one full polish step towards machine-level residuals
      VectorXd cand = theta;
      const VectorXd step = newton_step(theta, uf);
      for (int a = 0; a < nf; ++a) cand[free_idx[a]] += step[a];
      if (family.valid(cand)) {
        const VectorXd cand_u = free_score(sample, beta, family, cand, free_idx);
        if (cand_u.lpNorm<Eigen::Infinity>() < uf.lpNorm<Eigen::Infinity>()) {
          theta = cand;
          out.residual = residual_of(theta, cand_u);
        }
      }
      out.converged = true;
      out.theta = theta;
      return out;
    }

    const VectorXd step = newton_step(theta, uf);
    const double unorm = uf.lpNorm<Eigen::Infinity>();
    double alpha = 1.0;
    bool stepped = false;
    for (int half = 0; half < 50; ++half, alpha *= 0.5) {
      VectorXd cand = theta;
      for (int a = 0; a < nf; ++a) cand[free_idx[a]] += alpha * step[a];
      if (!family.valid(cand)) continue;
      const double cand_obj = dpd_objective(sample, cand, beta, family);
      const VectorXd cand_u = free_score(sample, beta, family, cand, free_idx);
      const bool obj_ok = cand_obj <= obj + 1e-14 * (1.0 + std::fabs(obj));
      const bool res_ok = cand_u.lpNorm<Eigen::Infinity>() <= 0.9 * unorm;
      if (obj_ok || res_ok) {
        theta = cand;
        obj = cand_obj;
        uf = cand_u;
        stepped = true;
        break;
      }
    }
    if (!stepped) break;  // line search stalled
  }
  out.theta = theta;
  return out;
}

std::vector<int> all_indices(int p) {
  std::vector<int> idx(p);
  for (int i = 0; i < p; ++i) idx[i] = i;
  return idx;
}

void add_start(std::vector<VectorXd>& starts, const ModelFamily& family,
               const VectorXd& cand) {
  if (!family.valid(cand)) return;
  for (const auto& s : starts)
    if ((s - cand).lpNorm<Eigen::Infinity>() <=
        1e-9 * (1.0 + cand.lpNorm<Eigen::Infinity>()))
      return;
  starts.push_back(cand);
}

std::vector<VectorXd> multistart_schedule(const Sample& sample, double beta,
                                          const ModelFamily& family,
                                          const VectorXd& init,
                                          const SolverOptions& options) {
  std::vector<VectorXd> starts;
  add_start(starts, family, init);
  if (!options.multistart) return starts;

  const VectorXd robust = family.initial_guess(sample);
  add_start(starts, family, robust);
  if (beta > 0.0) {
    // MLE start: one beta = 0 solve from the robust point.
    try {
      const Attempt mle = solve_scoring(sample, 0.0, family, robust,
                                        all_indices(family.dimension()), {});
      if (mle.converged) add_start(starts, family, mle.theta);
    } catch (const NumericError&) {
    }
  }
  const VectorXd pert = family.start_perturbation(robust);
  add_start(starts, family, robust + pert);
  add_start(starts, family, robust - pert);
  return starts;
}

}  // namespace

EstimateReport mdpde(const Sample& sample, double beta, const ModelFamily& family,
                     const VectorXd& init, const SolverOptions& options) {
  family.require_valid(init);
  if (beta < 0.0) throw std::invalid_argument("mdpde: beta must be >= 0");

  const auto free_idx = all_indices(family.dimension());
  Attempt best;
  bool have_converged = false;
  double best_obj = std::numeric_limits<double>::infinity();
  for (const VectorXd& start : multistart_schedule(sample, beta, family, init,
                                                   options)) {
    Attempt att;
    try {
      att = solve_scoring(sample, beta, family, start, free_idx, options);
    } catch (const NumericError&) {
      continue;
    }
    const double obj = dpd_objective(sample, att.theta, beta, family);
    if (att.converged) {
      if (!have_converged || obj < best_obj) {
        best = att;
        best_obj = obj;
      }
      have_converged = true;
    } else if (!have_converged && att.residual < best.residual) {
      best = att;
      best_obj = obj;
    }
  }
  if (best.theta.size() == 0) best.theta = init;

  EstimateReport report;
  report.theta_hat = best.theta;
  report.converged = best.converged;
  report.iterations = best.iterations;
  report.objective_value = dpd_objective(sample, best.theta, beta, family);
  if (best.converged)
    report.asymptotic_cov = asymptotic_cov_unrestricted(best.theta, beta, family);
  return report;
}

namespace {

// Newton iteration on the Lagrangian system F(theta, lambda) =
// [U + M lambda; m] = 0, with the theta block of the Jacobian taken by
// finite differences of U + M lambda.
Attempt solve_lagrangian(const Sample& sample, double beta,
                         const ModelFamily& family, const Constraint& constraint,
                         VectorXd theta, const SolverOptions& options) {
  const int p = family.dimension();
  const int r = constraint.r;
  Attempt out;

  auto stationarity = [&](const VectorXd& th, const VectorXd& la) {
    return (score_mean(sample, th, beta, family) +
            constraint.jacobian(th) * la)
        .eval();
  };

  MatrixXd m_jac = constraint.jacobian(theta);
  VectorXd lambda =
      -(m_jac.transpose() * m_jac)
           .fullPivLu()
           .solve(m_jac.transpose() * score_mean(sample, theta, beta, family));

  auto merit = [&](const VectorXd& th, const VectorXd& la) {
    return stationarity(th, la).squaredNorm() + constraint.m(th).squaredNorm();
  };

  for (int it = 0; it < options.max_iterations; ++it) {
    const InfoMatrices info = info_matrices(theta, beta, family);
    const VectorXd g = stationarity(theta, lambda);
    m_jac = constraint.jacobian(theta);
    const VectorXd mval = constraint.m(theta);

    out.iterations = it;
    out.residual = detail::scaled_residual(g, info.K);
    if (out.residual < options.tolerance &&
        mval.lpNorm<Eigen::Infinity>() < 1e-10) {
      out.converged = true;
      out.theta = theta;
      return out;
    }

    MatrixXd g_jac(p, p);
    for (int j = 0; j < p; ++j) {
      const double h = 1e-6 * (1.0 + std::fabs(theta[j]));
      VectorXd up = theta, dn = theta;
      up[j] += h;
      dn[j] -= h;
      if (!family.valid(dn)) dn = theta;
      if (!family.valid(up)) up = theta;
      g_jac.col(j) =
          (stationarity(up, lambda) - stationarity(dn, lambda)) /
          (up[j] - dn[j]);
    }

    MatrixXd kkt = MatrixXd::Zero(p + r, p + r);
    kkt.topLeftCorner(p, p) = g_jac;
    kkt.topRightCorner(p, r) = m_jac;
    kkt.bottomLeftCorner(r, p) = m_jac.transpose();
    VectorXd rhs(p + r);
    rhs.head(p) = -g;
    rhs.tail(r) = -mval;
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (!lu.isInvertible())
      throw NumericError("rmdpde: singular Lagrangian system (rank of M?)");
    const VectorXd delta = lu.solve(rhs);

    const double merit0 = merit(theta, lambda);
    double alpha = 1.0;
    bool stepped = false;
    for (int half = 0; half < 50; ++half, alpha *= 0.5) {
      const VectorXd th = theta + alpha * delta.head(p);
      if (!family.valid(th)) continue;
      const VectorXd la = lambda + alpha * delta.tail(r);
      if (merit(th, la) <= merit0 * (1.0 - 1e-4 * alpha) + 1e-30) {
        theta = th;
        lambda = la;
        stepped = true;
        break;
      }
    }
    if (!stepped) break;
  }
  out.theta = theta;
  return out;
}

}  // namespace

EstimateReport rmdpde(const Sample& sample, double beta, const ModelFamily& family,
                      const Constraint& constraint, const VectorXd& init,
                      const SolverOptions& options) {
  family.require_valid(init);
  if (beta < 0.0) throw std::invalid_argument("rmdpde: beta must be >= 0");
  const int p = family.dimension();
  if (constraint.r > p) throw std::invalid_argument("rmdpde: r must be <= p");
  const double feas_tol = 1e-12 * (1.0 + init.lpNorm<Eigen::Infinity>());
  if (constraint.m(init).lpNorm<Eigen::Infinity>() > feas_tol)
    throw std::invalid_argument("rmdpde: infeasible initial point");

  EstimateReport report;

  if (constraint.kind == Constraint::Kind::FixedSubset) {
    std::vector<int> free_idx;
    for (int i = 0; i < p; ++i)
      if (std::find(constraint.fixed_indices.begin(),
                    constraint.fixed_indices.end(),
                    i) == constraint.fixed_indices.end())
        free_idx.push_back(i);

    VectorXd pinned = init;
    for (size_t i = 0; i < constraint.fixed_indices.size(); ++i)
      pinned[constraint.fixed_indices[i]] =
          constraint.fixed_values[static_cast<int>(i)];

    if (free_idx.empty()) {  // full pin: nothing to estimate
      report.theta_hat = pinned;
      report.converged = true;
      report.iterations = 0;
      report.objective_value = dpd_objective(sample, pinned, beta, family);
      report.asymptotic_cov =
          restricted_projection_matrices(pinned, beta, family, constraint).Sigma;
      return report;
    }

    std::vector<VectorXd> starts;
    add_start(starts, family, pinned);
    if (options.multistart) {
      VectorXd robust = family.initial_guess(sample);
      for (size_t i = 0; i < constraint.fixed_indices.size(); ++i)
        robust[constraint.fixed_indices[i]] =
            constraint.fixed_values[static_cast<int>(i)];
      add_start(starts, family, robust);
      const VectorXd pert = family.start_perturbation(robust);
      VectorXd up = robust, dn = robust;
      for (int f : free_idx) {
        up[f] += pert[f];
        dn[f] -= pert[f];
      }
      add_start(starts, family, up);
      add_start(starts, family, dn);
    }

    Attempt best;
    bool have_converged = false;
    double best_obj = std::numeric_limits<double>::infinity();
    for (const VectorXd& start : starts) {
      Attempt att;
      try {
        att = solve_scoring(sample, beta, family, start, free_idx, options);
      } catch (const NumericError&) {
        continue;
      }
      const double obj = dpd_objective(sample, att.theta, beta, family);
      if (att.converged) {
        if (!have_converged || obj < best_obj) {
          best = att;
          best_obj = obj;
        }
        have_converged = true;
      } else if (!have_converged && att.residual < best.residual) {
        best = att;
      }
    }
    if (best.theta.size() == 0) best.theta = pinned;
    report.theta_hat = best.theta;
    report.converged = best.converged;
    report.iterations = best.iterations;
  } else {
    const Attempt att =
        solve_lagrangian(sample, beta, family, constraint, init, options);
    report.theta_hat = att.theta;
    report.converged = att.converged;
    report.iterations = att.iterations;
  }

  report.objective_value =
      dpd_objective(sample, report.theta_hat, beta, family);
  if (report.converged)
    report.asymptotic_cov =
        restricted_projection_matrices(report.theta_hat, beta, family, constraint)
            .Sigma;
  return report;
}

MatrixXd asymptotic_cov_unrestricted(const VectorXd& theta, double beta,
                                     const ModelFamily& family) {
  const InfoMatrices info = info_matrices(theta, beta, family);
  const MatrixXd jinv = detail::spd_inverse(info.J, "J");
  return jinv * info.K * jinv;
}

ProjectionMatrices restricted_projection_matrices(const VectorXd& theta,
                                                  double beta,
                                                  const ModelFamily& family,
                                                  const Constraint& constraint) {
  const InfoMatrices info = info_matrices(theta, beta, family);
  const MatrixXd m_jac = constraint.jacobian(theta);
  const MatrixXd jinv = detail::spd_inverse(info.J, "J");
  const MatrixXd a = m_jac.transpose() * jinv * m_jac;  // r x r
  const MatrixXd ainv = detail::spd_inverse(a, "M^T J^{-1} M");
  ProjectionMatrices out;
  out.Q = jinv * m_jac * ainv;
  out.P = jinv - out.Q * m_jac.transpose() * jinv;
  out.Sigma = out.P * info.K * out.P;
  return out;
}

}  // namespace raodpd
