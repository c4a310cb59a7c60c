#include <cmath>
#include <doctest.h>
#include <stdexcept>
#include <vector>

#include "raodpd/distributions.hpp"
#include "raodpd/errors.hpp"
#include "raodpd/rng.hpp"

using namespace raodpd;

namespace {

// Independent oracles, kept free of the implementation paths they check.

// df = 1: P(chi2_1 > x) = P(|Z| > sqrt(x)) = erfc(sqrt(x/2)).
double chi2_survival_df1_oracle(double x) { return std::erfc(std::sqrt(0.5 * x)); }

// df = 3 by Simpson integration of the density on [x, x + 400].
double chi2_survival_df3_oracle(double x) {
  auto density = [](double t) {
    return std::sqrt(t) * std::exp(-0.5 * t) /
           (std::sqrt(2.0 * M_PI) * 1.0);  // Gamma(3/2) = sqrt(pi)/2
  };
  const int n = 200000;  // even
  const double hi = x + 400.0;
  const double h = (hi - x) / n;
  double acc = density(x) + density(hi);
  for (int i = 1; i < n; ++i) acc += density(x + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// df = 1 noncentral: P((Z + sqrt(delta))^2 > x) = P(|Z + sqrt(delta)| > sqrt(x)).
double noncentral_df1_oracle(double x, double delta) {
  const double s = std::sqrt(delta), r = std::sqrt(x);
  return phi_cdf(-r - s) + 1.0 - phi_cdf(r - s);
}

}  // namespace

TEST_CASE("chi2_survival matches its oracles") {
  CHECK(chi2_survival(0.0, 1) == 1.0);
  CHECK(std::fabs(chi2_survival(3.841459, 1) -
                  chi2_survival_df1_oracle(3.841459)) < 1e-12);
  CHECK(std::fabs(chi2_survival(3.841459, 1) - 0.05) < 1e-6);
  // integration oracle, df = 3 (value 0.2791004)
  const double oracle3 = chi2_survival_df3_oracle(3.841459);
  CHECK(std::fabs(chi2_survival(3.841459, 3) - oracle3) < 1e-7);
  CHECK(std::fabs(oracle3 - 0.2791004) < 1e-6);
}

TEST_CASE("chi2_survival is monotone nonincreasing in x") {
  for (int df : {1, 2, 5, 17}) {
    double prev = 2.0;
    for (double x = 0.0; x <= 60.0; x += 0.37) {
      const double s = chi2_survival(x, df);
      CHECK(s <= prev);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      prev = s;
    }
  }
}

TEST_CASE("chi2_survival domain errors") {
  CHECK_THROWS_AS(chi2_survival(-0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(chi2_survival(1.0, 0), std::invalid_argument);
}

TEST_CASE("chi2_quantile values and roundtrip") {
  CHECK(std::fabs(chi2_quantile(0.05, 1) - 3.841459) < 1e-4);
  CHECK(std::fabs(chi2_quantile(0.05, 2) - (-2.0 * std::log(0.05))) < 1e-4);
  CHECK(std::fabs(chi2_quantile(0.5, 2) - (-2.0 * std::log(0.5))) < 1e-6);
  for (int df : {1, 2, 5, 20})
    for (double alpha : {0.01, 0.05, 0.1})
      CHECK(std::fabs(chi2_survival(chi2_quantile(alpha, df), df) - alpha) <
            1e-8);
  CHECK_THROWS_AS(chi2_quantile(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(chi2_quantile(1.0, 1), std::invalid_argument);
}

TEST_CASE("chi2_quantile agrees with the normal quantile at df = 1") {
  for (double alpha : {0.01, 0.05, 0.2}) {
    const double z = normal_quantile(1.0 - 0.5 * alpha);
    CHECK(std::fabs(chi2_quantile(alpha, 1) - z * z) < 1e-8);
  }
}

TEST_CASE("poisson_weight") {
  CHECK(poisson_weight(0.0, 0) == 1.0);
  CHECK(poisson_weight(0.0, 3) == 0.0);
  CHECK(std::fabs(poisson_weight(2.0, 1) - std::exp(-1.0)) < 1e-6);

  // mass sums to one under the module truncation rule
  for (double s : {0.0, 0.5, 3.0, 17.0, 50.0}) {
    double mass = 0.0;
    int k = 0;
    while (mass < 1.0 - 1e-12 && k < 10000) mass += poisson_weight(s, k++);
    CHECK(mass >= 1.0 - 1e-10);
    CHECK(mass <= 1.0 + 1e-12);
  }
}

TEST_CASE("noncentral_chi2_survival reduces, matches normal oracle") {
  const double t = 3.841459;
  CHECK(std::fabs(noncentral_chi2_survival(t, {1, 0.0}) -
                  chi2_survival(t, 1)) < 1e-6);
  CHECK(std::fabs(noncentral_chi2_survival(t, {1, 4.0}) -
                  noncentral_df1_oracle(t, 4.0)) < 1e-4);
  const double v11 = noncentral_chi2_survival(t, {1, 11.0});
  CHECK(v11 > 0.85);
  CHECK(v11 < 0.95);
  CHECK(std::fabs(v11 - noncentral_df1_oracle(t, 11.0)) < 1e-4);
}

TEST_CASE("noncentral_chi2_survival vs Monte Carlo oracle, df = 1, delta = 11") {
  CounterRng rng(99);
  const double t = 3.841459;
  const double shift = std::sqrt(11.0);
  const int draws = 1000000;
  long hits = 0;
  for (int i = 0; i < draws; ++i) {
    const double z = rng.next_normal() + shift;
    if (z * z > t) ++hits;
  }
  const double mc = static_cast<double>(hits) / draws;
  const double se = std::sqrt(mc * (1.0 - mc) / draws);
  CHECK(std::fabs(noncentral_chi2_survival(t, {1, 11.0}) - mc) < 4.0 * se);
}

TEST_CASE("noncentral_chi2_survival is nondecreasing in the noncentrality") {
  for (int df : {1, 3}) {
    double prev = 0.0;
    for (double delta = 0.0; delta <= 40.0; delta += 1.7) {
      const double s = noncentral_chi2_survival(6.0, {df, delta});
      CHECK(s >= prev - 1e-13);
      prev = s;
    }
  }
}

TEST_CASE("pif_series analytic limits") {
  const double t = chi2_quantile(0.05, 1);
  // s = 0: P(chi2_3 > t) - P(chi2_1 > t); value 0.229100
  const double oracle = chi2_survival(t, 3) - chi2_survival(t, 1);
  CHECK(std::fabs(pif_series(0.0, 1, t) - oracle) < 5e-4);
  CHECK(std::fabs(oracle - 0.229100) < 1e-5);
  // threshold 0: both survival factors are 1, the series telescopes to 0
  CHECK(pif_series(0.0, 1, 0.0) == 0.0);
}

TEST_CASE("pif_series equals twice the noncentrality derivative") {
  const double t = 3.841459;
  for (double s : {0.5, 2.0, 7.0}) {
    const double h = 1e-4 * (1.0 + s);
    const double fd = (noncentral_chi2_survival(t, {1, s + h}) -
                       noncentral_chi2_survival(t, {1, s - h})) /
                      (2.0 * h);
    CHECK(std::fabs(pif_series(s, 1, t) - 2.0 * fd) < 1e-4);
  }
}

TEST_CASE("normal_quantile round trip") {
  for (double p : {1e-10, 1e-4, 0.025, 0.31, 0.5, 0.77, 0.975, 1 - 1e-7}) {
    const double z = normal_quantile(p);
    CHECK(std::fabs(phi_cdf(z) - p) < 1e-12 * (1.0 + 1.0 / std::min(p, 1 - p)));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
}
