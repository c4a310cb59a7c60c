#pragma once

#include <cstdint>

namespace raodpd {

// Central and noncentral chi-square machinery plus the series used by the
// power/level influence analysis. All functions are pure and thread-safe.

struct ChiSqSpec {
  int df = 1;                 // degrees of freedom, >= 1
  double noncentrality = 0.0; // >= 0; 0 means the central distribution
};

// P(chi2_df > x). Domain error on x < 0 or df < 1.
double chi2_survival(double x, int df);

// Upper quantile: t with chi2_survival(t, df) = alpha, alpha in (0,1).
double chi2_quantile(double alpha, int df);

// Poisson-type series weight c_k(s) = s^k e^{-s/2} / (k! 2^k).
// The weights over k sum to one; underflow returns 0.
double poisson_weight(double s, int k);

// P(chi2 > x) for the noncentral distribution, evaluated as
// sum_k c_k(delta) P(chi2_{df+2k} > x). The series is truncated once the
// accumulated weight mass reaches 1 - 1e-12; hitting the hard cap of
// 10,000 terms raises NumericError instead of returning a partial sum.
double noncentral_chi2_survival(double x, const ChiSqSpec& spec);

// Series coefficient of the power influence function:
//   C_df(s) = e^{-s/2} sum_k s^{k-1}/(k! 2^k) (2k - s) P(chi2_{df+2k} > threshold)
// with the k = 0 term read as its analytic limit -P(chi2_df > threshold).
// Equals twice the derivative of noncentral_chi2_survival in the
// noncentrality at delta = s.
double pif_series(double s, int df, double threshold);

// Standard normal helpers (used by the oracles and the inverse-CDF sampler).
double normal_cdf(double x);
// Wichura's AS 241 (PPND16); p in (0,1).
double normal_quantile(double p);

namespace detail {
// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
}  // namespace detail

}  // namespace raodpd
