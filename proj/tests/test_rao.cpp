#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <random>
#include <vector>

#include "raodpd/distributions.hpp"
#include "raodpd/normal.hpp"
#include "raodpd/rao_test.hpp"
#include "raodpd/rng.hpp"

using namespace raodpd;

namespace {

VectorXd vec1(double a) {
  VectorXd v(1);
  v << a;
  return v;
}

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

Constraint pin_mu(double mu0) {
  return Constraint::fix_components({0}, vec1(mu0), 2);
}

Sample normal_sample(uint64_t seed, int n, double mean = 0.0, double sd = 1.0) {
  CounterRng rng(seed);
  std::vector<double> obs(n);
  for (double& v : obs) v = rng.next_normal(mean, sd);
  return Sample(obs);
}

}  // namespace

TEST_CASE("rao_simple basics") {
  const NormalMeanFamily family(1.0);
  const Sample pm1(std::vector<double>{-1.0, 1.0});
  for (double beta : {0.0, 0.6}) {
    const TestReport rep = rao_simple(pm1, vec1(0.0), beta, family);
    CHECK(rep.statistic < 1e-20);
    CHECK(rep.p_value > 1.0 - 1e-9);
    CHECK_FALSE(rep.reject);
    CHECK(rep.df == 1);
  }
}

TEST_CASE("rao_simple on the telephone data") {
  const NormalMeanFamily family(175.0);
  const TestReport rep = rao_simple(telephone_data(), vec1(0.0), 0.0, family);
  CHECK(std::fabs(rep.statistic - 0.7446) < 1e-3);
  CHECK_FALSE(rep.reject);
  CHECK(rep.p_value > 0.05);
  // closed form at beta = 0: squared z statistic
  const double closed = simple_mean_stat(telephone_data(), 0.0, 175.0, 0.0);
  CHECK(std::fabs(rep.statistic - closed) < 1e-8 * (1.0 + closed));
}

TEST_CASE("rao_simple equals the explicit weighted-sum form") {
  const NormalMeanFamily family(1.0);
  const Sample sample = normal_sample(11, 20);
  for (double beta : {0.0, 0.3, 1.0}) {
    std::vector<double> terms;
    for (double x : sample) terms.push_back(x * std::exp(-0.5 * beta * x * x));
    const double s = sum_sorted(terms);
    const double explicit_form =
        std::pow(2.0 * beta + 1.0, 1.5) / sample.size() * s * s;
    const TestReport rep = rao_simple(sample, vec1(0.0), beta, family);
    CHECK(std::fabs(rep.statistic - explicit_form) <
          1e-10 * (1.0 + explicit_form));
  }
}

TEST_CASE("rao_composite on the telephone data") {
  const NormalFamily family;
  const Sample& tel = telephone_data();

  const TestReport full = rao_composite(tel, 0.0, family, pin_mu(0.0));
  CHECK(std::fabs(full.statistic - 0.2314) < 1e-3);
  CHECK_FALSE(full.reject);
  CHECK(full.df == 1);
  REQUIRE(full.estimator_used.has_value());
  CHECK(std::fabs((*full.estimator_used)[1] - 313.94) < 0.05);

  const Sample tel13(std::vector<double>(tel.begin() + 1, tel.end()));
  const TestReport del = rao_composite(tel13, 0.0, family, pin_mu(0.0));
  CHECK(std::fabs(del.statistic - 5.974) < 0.02);
  CHECK(del.reject);

  const Sample pm1(std::vector<double>{-1.0, 1.0});
  for (double beta : {0.0, 0.5}) {
    const TestReport rep = rao_composite(pm1, beta, family, pin_mu(0.0));
    CHECK(rep.statistic < 1e-18);
  }
}

TEST_CASE("rao_composite matches the closed-form composite statistic") {
  const NormalFamily family;
  const Sample& tel = telephone_data();
  for (double beta : {0.0, 0.3, 0.7}) {
    const TestReport rep = rao_composite(tel, beta, family, pin_mu(0.0));
    const CompositeMeanStat closed = composite_mean_stat(tel, 0.0, beta);
    CHECK(std::fabs(rep.statistic - closed.statistic) <
          1e-6 * (1.0 + closed.statistic));
  }
}

TEST_CASE("partition form coincides with the general composite form") {
  const NormalFamily family;
  const Sample& tel = telephone_data();
  for (double beta : {0.0, 0.3, 0.7}) {
    const TestReport general = rao_composite(tel, beta, family, pin_mu(0.0));
    const TestReport part =
        rao_composite_partition(tel, vec1(0.0), beta, family);
    CHECK(std::fabs(general.statistic - part.statistic) <
          1e-10 * (1.0 + general.statistic));
    CHECK(part.df == 1);
  }
}

TEST_CASE("beta = 0 partition: the two displayed block forms coincide") {
  const NormalFamily family;
  const Sample& tel = telephone_data();
  const TestReport part = rao_composite_partition(tel, vec1(0.0), 0.0, family);
  REQUIRE(part.estimator_used.has_value());
  const VectorXd theta = *part.estimator_used;
  const VectorXd u = score_mean(tel, theta, 0.0, family);
  const InfoMatrices info = info_matrices(theta, 0.0, family);
  // information is diagonal, so I11 - I12 I22^{-1} I21 = I11
  const double schur =
      info.K(0, 0) - info.K(0, 1) * info.K(1, 0) / info.K(1, 1);
  const double alt = tel.size() * u[0] * u[0] / schur;
  CHECK(std::fabs(part.statistic - alt) < 1e-10 * (1.0 + alt));
}

TEST_CASE("lagrange multiplier form") {
  const NormalFamily family;
  const Sample& tel = telephone_data();

  SUBCASE("inactive constraint gives a vanishing multiplier") {
    const Sample sym(std::vector<double>{-2.0, -1.0, 1.0, 2.0});
    const LagrangeMultiplierStat lm =
        lagrange_multiplier_form(sym, 0.3, family, pin_mu(0.0));
    CHECK(std::fabs(lm.lambda[0]) < 1e-8);
    CHECK(lm.statistic < 1e-12);
  }
  SUBCASE("telephone equality with rao_composite") {
    for (double beta : {0.0, 0.4}) {
      const LagrangeMultiplierStat lm =
          lagrange_multiplier_form(tel, beta, family, pin_mu(0.0));
      const TestReport rep = rao_composite(tel, beta, family, pin_mu(0.0));
      CHECK(std::fabs(lm.statistic - rep.statistic) <
            1e-8 * (1.0 + rep.statistic));
      if (beta == 0.0) CHECK(std::fabs(lm.statistic - 0.2314) < 1e-3);
    }
  }
  SUBCASE("multiplier opposes the score: U(theta_tilde) = -M lambda") {
    const LagrangeMultiplierStat lm =
        lagrange_multiplier_form(tel, 0.0, family, pin_mu(0.0));
    const TestReport rep = rao_composite(tel, 0.0, family, pin_mu(0.0));
    const VectorXd u = score_mean(tel, *rep.estimator_used, 0.0, family);
    CHECK(u[0] * lm.lambda[0] < 0.0);
    CHECK(std::fabs(u[0] + lm.lambda[0]) < 1e-8 * (1.0 + std::fabs(u[0])));
  }
}

TEST_CASE("composite statistic is invariant to rescaling the constraint") {
  const NormalFamily family;
  const Sample& tel = telephone_data();
  const Constraint scaled = Constraint::general(
      1, [](const VectorXd& t) { return (5.0 * vec1(t[0])).eval(); },
      [](const VectorXd&) {
        MatrixXd m(2, 1);
        m << 5.0, 0.0;
        return m;
      });
  for (double beta : {0.0, 0.4}) {
    const TestReport a = rao_composite(tel, beta, family, scaled, 0.05,
                                       {vec2(0.0, 300.0), {}});
    const TestReport b = rao_composite(tel, beta, family, pin_mu(0.0));
    CHECK(std::fabs(a.statistic - b.statistic) < 1e-8 * (1.0 + b.statistic));
  }
}

TEST_CASE("test reports are exactly permutation invariant") {
  const NormalMeanFamily family(175.0);
  const Sample& tel = telephone_data();
  std::vector<double> shuffled(tel.begin(), tel.end());
  std::mt19937 gen(3);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const Sample tel_sh(shuffled);
  const TestReport a = rao_simple(tel, vec1(0.0), 0.5, family);
  const TestReport b = rao_simple(tel_sh, vec1(0.0), 0.5, family);
  CHECK(a.statistic == b.statistic);
}

TEST_CASE("null calibration: Kolmogorov-Smirnov distance to chi-square") {
  const NormalMeanFamily family(1.0);
  const int n = 200, reps = 5000;
  for (double beta : {0.0, 0.5}) {
    std::vector<double> stats;
    stats.reserve(reps);
    for (int r = 0; r < reps; ++r) {
      CounterRng rng(2024, static_cast<uint64_t>(beta * 2),
                     static_cast<uint64_t>(r));
      std::vector<double> obs(n);
      for (double& v : obs) v = rng.next_normal();
      stats.push_back(
          rao_simple(Sample(obs), vec1(0.0), beta, family).statistic);
    }
    std::sort(stats.begin(), stats.end());
    double ks = 0.0;
    for (int i = 0; i < reps; ++i) {
      const double cdf = 1.0 - chi2_survival(stats[i], 1);
      ks = std::max(ks, std::fabs(cdf - (i + 1.0) / reps));
      ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / reps));
    }
    CHECK(ks < 0.02);
  }
}

TEST_CASE("consistency: the statistic grows linearly under a fixed alternative") {
  const NormalMeanFamily family(1.0);
  const int reps = 200;
  for (double beta : {0.0, 0.5}) {
    std::vector<double> medians;
    for (int n : {50, 100, 200, 400}) {
      std::vector<double> stats;
      stats.reserve(reps);
      for (int r = 0; r < reps; ++r) {
        CounterRng rng(808, static_cast<uint64_t>(n),
                       static_cast<uint64_t>(r));
        std::vector<double> obs(n);
        for (double& v : obs) v = rng.next_normal(0.5, 1.0);
        stats.push_back(simple_mean_stat(Sample(obs), 0.0, 1.0, beta));
      }
      std::nth_element(stats.begin(), stats.begin() + reps / 2, stats.end());
      medians.push_back(stats[reps / 2]);
    }
    for (size_t i = 0; i + 1 < medians.size(); ++i)
      CHECK(medians[i + 1] > 1.5 * medians[i]);
    CHECK(medians.back() > 6.0 * medians.front());
  }
}
