#include "raodpd/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "raodpd/errors.hpp"

namespace raodpd {

Sample::Sample(std::vector<double> observations) : obs_(std::move(observations)) {
  if (obs_.empty()) throw std::invalid_argument("Sample: empty sample");
  for (double v : obs_)
    if (!std::isfinite(v))
      throw std::invalid_argument("Sample: observations must be finite");
}

double sum_sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

double ModelFamily::density(double x, const VectorXd& theta) const {
  return std::exp(log_density(x, theta));
}

VectorXd ModelFamily::start_perturbation(const VectorXd& theta) const {
  VectorXd d(theta.size());
  for (int i = 0; i < theta.size(); ++i) d[i] = 0.5 * (1.0 + std::fabs(theta[i]));
  return d;
}

void ModelFamily::require_valid(const VectorXd& theta) const {
  if (theta.size() != dimension())
    throw std::invalid_argument("parameter dimension mismatch");
  if (!valid(theta))
    throw std::invalid_argument("parameter outside the family's valid set");
}

namespace detail {

const std::vector<std::pair<double, double>>& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix with
  // off-diagonal sqrt(j/2), weights sqrt(pi) times the squared first
  // eigenvector components. Stable at any order, unlike polynomial
  // recurrences which overflow past n ~ 150.
  MatrixXd jacobi = MatrixXd::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    const double b = std::sqrt(0.5 * j);
    jacobi(j, j - 1) = b;
    jacobi(j - 1, j) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success)
    throw NumericError("gauss_hermite: eigen decomposition failed");
  const double mu0 = std::sqrt(M_PI);
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < n; ++i) {
    const double q0 = es.eigenvectors()(0, i);
    rule[i] = {es.eigenvalues()[i], mu0 * q0 * q0};
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

static double grid_sum(const WeightedGrid& grid,
                       const std::function<double(double)>& h) {
  std::vector<double> terms(grid.points.size());
  for (size_t i = 0; i < grid.points.size(); ++i)
    terms[i] = grid.weights[i] * h(grid.points[i]);
  return sum_sorted(std::move(terms));
}

double checked_integral(const ModelFamily& family, const VectorXd& theta,
                        double c, const std::function<double(double)>& h,
                        int nodes) {
  // Node doubling as the refinement check; escalate a few times for
  // integrands the base rule cannot resolve (e.g. divergences between
  // far-apart parameter points) before giving up.
  double coarse = grid_sum(family.power_kernel_grid(theta, c, nodes), h);
  for (int n = 2 * nodes; n <= 16 * nodes; n *= 2) {
    const double fine = grid_sum(family.power_kernel_grid(theta, c, n), h);
    if (std::fabs(fine - coarse) <= 1e-10 * (1.0 + std::fabs(fine)))
      return fine;
    coarse = fine;
  }
  throw NumericError("quadrature did not converge under node doubling");
}

}  // namespace detail

namespace {

constexpr int kNodes = 200;

// Componentwise checked integrals of a vector/matrix integrand.
VectorXd checked_vector_integral(const ModelFamily& family, const VectorXd& theta,
                                 double c,
                                 const std::function<VectorXd(double)>& h) {
  const int p = family.dimension();
  VectorXd out(p);
  for (int j = 0; j < p; ++j)
    out[j] = detail::checked_integral(family, theta, c,
                                      [&](double x) { return h(x)[j]; }, kNodes);
  return out;
}

MatrixXd checked_score_outer_integral(const ModelFamily& family,
                                      const VectorXd& theta, double c) {
  const int p = family.dimension();
  MatrixXd out(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = j; k < p; ++k) {
      out(j, k) = detail::checked_integral(
          family, theta, c,
          [&](double x) {
            const VectorXd s = family.score(x, theta);
            return s[j] * s[k];
          },
          kNodes);
      out(k, j) = out(j, k);
    }
  return out;
}

}  // namespace

VectorXd score_recentering(const VectorXd& theta, double beta,
                           const ModelFamily& family) {
  family.require_valid(theta);
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (beta == 0.0) return VectorXd::Zero(family.dimension());
  return checked_vector_integral(family, theta, beta + 1.0,
                                 [&](double x) { return family.score(x, theta); });
}

VectorXd beta_score(double x, const VectorXd& theta, double beta,
                    const ModelFamily& family) {
  family.require_valid(theta);
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (beta == 0.0) return family.score(x, theta);
  const double fpow = std::exp(beta * family.log_density(x, theta));
  return family.score(x, theta) * fpow - score_recentering(theta, beta, family);
}

VectorXd score_mean(const Sample& sample, const VectorXd& theta, double beta,
                    const ModelFamily& family) {
  family.require_valid(theta);
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  const int p = family.dimension();
  const VectorXd xi = score_recentering(theta, beta, family);
  std::vector<std::vector<double>> comps(p);
  for (auto& c : comps) c.reserve(sample.size());
  for (double x : sample) {
    const double fpow =
        beta == 0.0 ? 1.0 : std::exp(beta * family.log_density(x, theta));
    const VectorXd s = family.score(x, theta);
    for (int j = 0; j < p; ++j) comps[j].push_back(s[j] * fpow);
  }
  VectorXd mean(p);
  for (int j = 0; j < p; ++j)
    mean[j] = sum_sorted(std::move(comps[j])) / sample.size() - xi[j];
  return mean;
}

VectorXd population_score(const VectorXd& theta_eval, const VectorXd& theta_true,
                          double beta, const ModelFamily& family) {
  family.require_valid(theta_eval);
  family.require_valid(theta_true);
  const VectorXd xi = score_recentering(theta_eval, beta, family);
  return checked_vector_integral(
      family, theta_true, 1.0, [&](double x) -> VectorXd {
        const double fpow =
            beta == 0.0 ? 1.0
                        : std::exp(beta * family.log_density(x, theta_eval));
        return (family.score(x, theta_eval) * fpow - xi).eval();
      });
}

InfoMatrices info_matrices(const VectorXd& theta, double beta,
                           const ModelFamily& family) {
  family.require_valid(theta);
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  InfoMatrices m;
  m.J = checked_score_outer_integral(family, theta, beta + 1.0);
  m.xi = score_recentering(theta, beta, family);
  m.K = checked_score_outer_integral(family, theta, 2.0 * beta + 1.0) -
        m.xi * m.xi.transpose();
  // Condition D4: J must be positive definite at the model.
  Eigen::LLT<MatrixXd> llt(m.J);
  if (llt.info() != Eigen::Success)
    throw NumericError("info_matrices: J is not positive definite (D4)");
  return m;
}

double dpd_objective(const Sample& sample, const VectorXd& theta, double beta,
                     const ModelFamily& family) {
  family.require_valid(theta);
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (beta == 0.0) {
    std::vector<double> ll;
    ll.reserve(sample.size());
    for (double x : sample) ll.push_back(family.log_density(x, theta));
    return -sum_sorted(std::move(ll)) / sample.size();
  }
  const double mass = detail::checked_integral(
      family, theta, beta + 1.0, [](double) { return 1.0; }, kNodes);
  std::vector<double> fpows;
  fpows.reserve(sample.size());
  for (double x : sample)
    fpows.push_back(std::exp(beta * family.log_density(x, theta)));
  const double emp = sum_sorted(std::move(fpows)) / sample.size();
  return mass - (beta + 1.0) / beta * emp;
}

double dpd_divergence(const VectorXd& theta_g, const VectorXd& theta_f,
                      double beta, const ModelFamily& family) {
  family.require_valid(theta_g);
  family.require_valid(theta_f);
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  double value;
  if (beta == 0.0) {
    value = detail::checked_integral(
        family, theta_g, 1.0,
        [&](double x) {
          return family.log_density(x, theta_g) - family.log_density(x, theta_f);
        },
        kNodes);
  } else {
    const double f_mass = detail::checked_integral(
        family, theta_f, beta + 1.0, [](double) { return 1.0; }, kNodes);
    const double g_mass = detail::checked_integral(
        family, theta_g, beta + 1.0, [](double) { return 1.0; }, kNodes);
    const double cross = detail::checked_integral(
        family, theta_g, 1.0,
        [&](double x) {
          return std::exp(beta * family.log_density(x, theta_f));
        },
        kNodes);
    value = f_mass - (beta + 1.0) / beta * cross + g_mass / beta;
  }
  if (value < 0.0) {
    if (value < -1e-10)
      throw NumericError("dpd_divergence: negative value, quadrature failure");
    value = 0.0;
  }
  return value;
}

}  // namespace raodpd
