#include "raodpd/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "raodpd/errors.hpp"

namespace raodpd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double median(std::vector<double> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

double mad_scale(const Sample& sample, double center) {
  std::vector<double> dev;
  dev.reserve(sample.size());
  for (double x : sample) dev.push_back(std::fabs(x - center));
  const double mad = median(std::move(dev));
  return 1.4826 * mad;
}

double sample_mean(const Sample& sample) {
  std::vector<double> v(sample.begin(), sample.end());
  return sum_sorted(std::move(v)) / sample.size();
}

WeightedGrid normal_power_grid(double mu, double sigma, double c, int nodes) {
  // f^c is a normal kernel centred at mu with width sigma/sqrt(c):
  //   int h f^c = (2 pi sigma^2)^{-c/2} sqrt(2/c) sigma
  //               * int e^{-t^2} h(mu + sqrt(2/c) sigma t) dt.
  const auto& rule = detail::gauss_hermite(nodes);
  const double spread = std::sqrt(2.0 / c) * sigma;
  const double logpref = -0.5 * c * (kLog2Pi + 2.0 * std::log(sigma)) +
                         std::log(spread);
  WeightedGrid grid;
  grid.points.reserve(rule.size());
  grid.weights.reserve(rule.size());
  for (const auto& [t, w] : rule) {
    grid.points.push_back(mu + spread * t);
    grid.weights.push_back(std::exp(logpref + std::log(w)));
  }
  return grid;
}

}  // namespace

NormalMeanFamily::NormalMeanFamily(double sigma0) : sigma0_(sigma0) {
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("NormalMeanFamily: sigma0 must be > 0");
}

bool NormalMeanFamily::valid(const VectorXd& theta) const {
  return theta.size() == 1 && std::isfinite(theta[0]);
}

double NormalMeanFamily::log_density(double x, const VectorXd& theta) const {
  const double z = (x - theta[0]) / sigma0_;
  return -0.5 * (kLog2Pi + 2.0 * std::log(sigma0_) + z * z);
}

VectorXd NormalMeanFamily::score(double x, const VectorXd& theta) const {
  VectorXd s(1);
  s[0] = (x - theta[0]) / (sigma0_ * sigma0_);
  return s;
}

WeightedGrid NormalMeanFamily::power_kernel_grid(const VectorXd& theta, double c,
                                                 int nodes) const {
  return normal_power_grid(theta[0], sigma0_, c, nodes);
}

VectorXd NormalMeanFamily::initial_guess(const Sample& sample) const {
  VectorXd g(1);
  g[0] = median(std::vector<double>(sample.begin(), sample.end()));
  return g;
}

VectorXd NormalMeanFamily::start_perturbation(const VectorXd&) const {
  VectorXd d(1);
  d[0] = sigma0_;
  return d;
}

bool NormalFamily::valid(const VectorXd& theta) const {
  return theta.size() == 2 && std::isfinite(theta[0]) &&
         std::isfinite(theta[1]) && theta[1] > 0.0;
}

double NormalFamily::log_density(double x, const VectorXd& theta) const {
  const double z = (x - theta[0]) / theta[1];
  return -0.5 * (kLog2Pi + 2.0 * std::log(theta[1]) + z * z);
}

VectorXd NormalFamily::score(double x, const VectorXd& theta) const {
  const double sigma = theta[1];
  const double z = (x - theta[0]) / sigma;
  VectorXd s(2);
  s[0] = z / sigma;
  s[1] = (z * z - 1.0) / sigma;
  return s;
}

WeightedGrid NormalFamily::power_kernel_grid(const VectorXd& theta, double c,
                                             int nodes) const {
  return normal_power_grid(theta[0], theta[1], c, nodes);
}

VectorXd NormalFamily::initial_guess(const Sample& sample) const {
  VectorXd g(2);
  g[0] = median(std::vector<double>(sample.begin(), sample.end()));
  double s = mad_scale(sample, g[0]);
  if (s <= 0.0) {  // constant-ish sample; fall back to rms spread or unity
    s = std::sqrt(s2_mu0(sample, g[0]));
    if (s <= 0.0) s = 1.0;
  }
  g[1] = s;
  return g;
}

VectorXd NormalFamily::start_perturbation(const VectorXd& theta) const {
  VectorXd d(2);
  d[0] = theta[1];
  d[1] = 0.5 * theta[1];
  return d;
}

double u1(double x, const NormalParams& params, double beta) {
  if (beta < 0.0) throw std::invalid_argument("u1: beta must be >= 0");
  if (!(params.sigma > 0.0)) throw std::invalid_argument("u1: sigma must be > 0");
  const double z = (x - params.mu) / params.sigma;
  const double logpref = -(beta + 2.0) * std::log(params.sigma) -
                         0.5 * beta * kLog2Pi - 0.5 * beta * z * z;
  return (x - params.mu) * std::exp(logpref);
}

double u2(double x, const NormalParams& params, double beta) {
  if (beta < 0.0) throw std::invalid_argument("u2: beta must be >= 0");
  if (!(params.sigma > 0.0)) throw std::invalid_argument("u2: sigma must be > 0");
  const double z = (x - params.mu) / params.sigma;
  const double logpref =
      -(beta + 1.0) * std::log(params.sigma) - 0.5 * beta * kLog2Pi;
  const double bracket = (z * z - 1.0) * std::exp(-0.5 * beta * z * z) +
                         beta / std::pow(beta + 1.0, 1.5);
  return std::exp(logpref) * bracket;
}

double tau(double beta) {
  if (beta < 0.0) throw std::invalid_argument("tau: beta must be >= 0");
  const double t = 2.0 * beta + 1.0;
  return 2.0 * (2.0 * beta * beta + 1.0) * std::sqrt(t) / (t * t * t) -
         beta * beta / std::pow(beta + 1.0, 3.0);
}

Eigen::Matrix2d k_matrix(const NormalParams& params, double beta) {
  if (beta < 0.0) throw std::invalid_argument("k_matrix: beta must be >= 0");
  if (!(params.sigma > 0.0))
    throw std::invalid_argument("k_matrix: sigma must be > 0");
  const double logscale =
      -2.0 * (beta + 1.0) * std::log(params.sigma) - beta * kLog2Pi;
  Eigen::Matrix2d k = Eigen::Matrix2d::Zero();
  k(0, 0) = std::exp(logscale - 1.5 * std::log(2.0 * beta + 1.0));
  k(1, 1) = tau(beta) * std::exp(logscale);
  return k;
}

double simple_mean_stat(const Sample& sample, double mu0, double sigma0,
                        double beta) {
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("simple_mean_stat: sigma0 must be > 0");
  if (beta < 0.0)
    throw std::invalid_argument("simple_mean_stat: beta must be >= 0");
  const int n = sample.size();
  if (beta == 0.0) {
    const double xbar = sample_mean(sample);
    const double t = (xbar - mu0) / (sigma0 / std::sqrt(static_cast<double>(n)));
    return t * t;
  }
  std::vector<double> terms;
  terms.reserve(n);
  for (double x : sample) {
    const double z = (x - mu0) / sigma0;
    terms.push_back(z * std::exp(-0.5 * beta * z * z));
  }
  const double s = sum_sorted(std::move(terms));
  return std::pow(2.0 * beta + 1.0, 1.5) / n * s * s;
}

JointStat simple_joint_stat(const Sample& sample, double mu0, double sigma0,
                            double beta) {
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("simple_joint_stat: sigma0 must be > 0");
  if (beta < 0.0)
    throw std::invalid_argument("simple_joint_stat: beta must be >= 0");
  const int n = sample.size();
  JointStat out;
  out.mean_part = simple_mean_stat(sample, mu0, sigma0, beta);
  if (beta == 0.0) {
    const double s2 = s2_mu0(sample, mu0);
    const double rel = (s2 - sigma0 * sigma0) / (sigma0 * sigma0);
    out.sigma_part = 0.5 * n * rel * rel;
  } else {
    std::vector<double> terms;
    terms.reserve(n);
    for (double x : sample) {
      const double z = (x - mu0) / sigma0;
      terms.push_back((z * z - 1.0) * std::exp(-0.5 * beta * z * z));
    }
    const double s =
        sum_sorted(std::move(terms)) + n * beta / std::pow(beta + 1.0, 1.5);
    out.sigma_part = s * s / (n * tau(beta));
  }
  out.total = out.mean_part + out.sigma_part;
  return out;
}

double s2_mu0(const Sample& sample, double mu0) {
  std::vector<double> sq;
  sq.reserve(sample.size());
  for (double x : sample) sq.push_back((x - mu0) * (x - mu0));
  return sum_sorted(std::move(sq)) / sample.size();
}

namespace {

// Averaged-u2 root function with the positive sigma prefactor dropped:
// same zeros, better conditioning.
double scale_equation(const Sample& sample, double mu0, double beta,
                      double sigma) {
  std::vector<double> terms;
  terms.reserve(sample.size());
  for (double x : sample) {
    const double z = (x - mu0) / sigma;
    terms.push_back((z * z - 1.0) * std::exp(-0.5 * beta * z * z));
  }
  return sum_sorted(std::move(terms)) +
         sample.size() * beta / std::pow(beta + 1.0, 1.5);
}

double refine_root(const Sample& sample, double mu0, double beta, double lo,
                   double hi, double flo, double fhi, double rel_tol) {
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double prop = (fhi != flo) ? hi - fhi * (hi - lo) / (fhi - flo) : t;
    if (!(prop > lo && prop < hi)) prop = 0.5 * (lo + hi);
    t = prop;
    const double ft = scale_equation(sample, mu0, beta, t);
    if (ft == 0.0 || hi - lo < rel_tol * t) return t;
    if ((ft > 0.0) == (flo > 0.0)) {
      lo = t;
      flo = ft;
    } else {
      hi = t;
      fhi = ft;
    }
  }
  return t;
}

}  // namespace

double sigma_tilde(const Sample& sample, double mu0, double beta,
                   const SigmaTildeOptions& options) {
  if (beta < 0.0) throw std::invalid_argument("sigma_tilde: beta must be >= 0");
  const double s2 = s2_mu0(sample, mu0);
  if (!(s2 > 0.0))
    throw NumericError("sigma_tilde: sample degenerate at mu0");
  const double s = std::sqrt(s2);
  if (beta == 0.0) return s;

  const double lo = s / options.bracket_span;
  const double hi = s * options.bracket_span;
  const double step =
      std::log(hi / lo) / (options.grid_points - 1);

  std::vector<double> roots;
  double prev = lo;
  double fprev = scale_equation(sample, mu0, beta, prev);
  if (fprev == 0.0)
    throw NumericError("sigma_tilde: root at bracket edge");
  for (int i = 1; i < options.grid_points; ++i) {
    const double cur = lo * std::exp(step * i);
    const double fcur = scale_equation(sample, mu0, beta, cur);
    if (fcur == 0.0 && i == options.grid_points - 1)
      throw NumericError("sigma_tilde: root at bracket edge");
    if (fcur == 0.0) {
      roots.push_back(cur);
    } else if ((fprev > 0.0) != (fcur > 0.0)) {
      roots.push_back(refine_root(sample, mu0, beta, prev, cur, fprev, fcur,
                                  options.rel_tol));
    }
    prev = cur;
    fprev = fcur;
  }
  if (roots.empty())
    throw NumericError(
        "sigma_tilde: no sign change in bracket (degenerate sample)");
  if (roots.size() == 1) return roots.front();

  // Several stationary scales: keep the divergence minimizer.
  static const NormalFamily family;
  double best = roots.front();
  double best_obj = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    VectorXd theta(2);
    theta << mu0, r;
    const double obj = dpd_objective(sample, theta, beta, family);
    if (obj < best_obj) {
      best_obj = obj;
      best = r;
    }
  }
  return best;
}

CompositeMeanStat composite_mean_stat(const Sample& sample, double mu0,
                                      double beta,
                                      const SigmaTildeOptions& options) {
  CompositeMeanStat out;
  out.sigma_tilde = sigma_tilde(sample, mu0, beta, options);
  if (beta == 0.0) {
    const double xbar = sample_mean(sample);
    const double t = (xbar - mu0) /
                     (out.sigma_tilde / std::sqrt(static_cast<double>(sample.size())));
    out.statistic = t * t;
    return out;
  }
  out.statistic = simple_mean_stat(sample, mu0, out.sigma_tilde, beta);
  return out;
}

const Sample& telephone_data() {
  static const Sample data(std::vector<double>{-988, -135, -78, 3, 59, 83, 93,
                                               110, 189, 197, 204, 229, 289,
                                               310});
  return data;
}

}  // namespace raodpd
