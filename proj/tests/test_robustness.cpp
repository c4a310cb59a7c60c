#include <cmath>
#include <doctest.h>
#include <stdexcept>
#include <vector>

#include "raodpd/distributions.hpp"
#include "raodpd/normal.hpp"
#include "raodpd/robustness.hpp"

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

}  // namespace

TEST_CASE("if_mdpde on the mean-only family") {
  const NormalMeanFamily family(1.0);
  for (double y : {-3.0, 0.2, 5.0})
    CHECK(std::fabs(if_mdpde(y, vec1(0.0), 0.0, family)[0] - y) < 1e-10);
  // redescending at beta > 0
  CHECK(std::fabs(if_mdpde(40.0, vec1(0.0), 0.5, family)[0]) < 1e-12);
  // frozen value at beta = 1, y = 1
  const double u_oracle = std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  const double oracle =
      std::pow(2.0, 1.5) * std::sqrt(2.0 * M_PI) * u_oracle;
  CHECK(std::fabs(if_mdpde(1.0, vec1(0.0), 1.0, family)[0] - oracle) < 1e-3);
}

TEST_CASE("if_rmdpde equals if_mdpde at the null and rejects off-null points") {
  const NormalFamily family;
  const Constraint c = pin_mu(0.0);
  for (double y : {-2.0, 0.0, 3.5}) {
    const VectorXd a = if_rmdpde(y, vec2(0.0, 1.0), 0.5, family, c);
    const VectorXd b = if_mdpde(y, vec2(0.0, 1.0), 0.5, family);
    CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  CHECK_THROWS_AS(if_rmdpde(1.0, vec2(0.5, 1.0), 0.5, family, c),
                  std::invalid_argument);
}

TEST_CASE("if2_simple dichotomy") {
  const NormalMeanFamily family(1.0);
  CHECK(if2_simple(0.0, vec1(0.0), 0.7, family) < 1e-18);

  // classical case grows like 2 (y - mu0)^2
  const double y = 1000.0;
  const double ratio = if2_simple(y, vec1(0.0), 0.0, family) / (2.0 * y * y);
  CHECK(std::fabs(ratio - 1.0) < 1e-10);

  // beta = 0.5: bounded, interior maximum, vanishing tails
  double sup = 0.0, arg = 0.0;
  for (double t = -20.0; t <= 20.0; t += 0.01) {
    const double v = if2_simple(t, vec1(0.0), 0.5, family);
    if (v > sup) {
      sup = v;
      arg = t;
    }
  }
  CHECK(sup > 0.0);
  CHECK(std::fabs(arg) < 10.0);
  CHECK(if2_simple(10.0, vec1(0.0), 0.5, family) < 1e-6);
}

TEST_CASE("if2_composite") {
  const NormalFamily family;
  const Constraint c = pin_mu(0.0);
  CHECK(if2_composite(0.0, vec2(0.0, 1.0), 0.4, family, c) < 1e-18);

  // beta = 0 with sigma = 1: reduces to 2 y^2 (diagonal information)
  const double y = 100.0;
  const double v0 = if2_composite(y, vec2(0.0, 1.0), 0.0, family, c);
  CHECK(std::fabs(v0 / (2.0 * y * y) - 1.0) < 1e-8);

  // bounded at beta = 0.5 with an interior maximum
  double sup = 0.0, arg = 0.0;
  for (double t = -20.0; t <= 20.0; t += 0.01) {
    const double v = if2_composite(t, vec2(0.0, 1.0), 0.5, family, c);
    if (v > sup) {
      sup = v;
      arg = t;
    }
  }
  CHECK(sup > 0.0);
  CHECK(std::fabs(arg) < 20.0 - 1e-9);
  CHECK(if2_composite(20.0, vec2(0.0, 1.0), 0.5, family, c) < sup * 1e-6);
}

TEST_CASE("noncentrality_simple") {
  const NormalMeanFamily family(1.0);
  CHECK(noncentrality_simple(vec1(0.0), vec1(0.0), 0.5, family) == 0.0);
  CHECK(std::fabs(noncentrality_simple(vec1(0.0), vec1(0.7), 0.0, family) -
                  0.49) < 1e-10);
  const double oracle = std::pow(3.0, 1.5) / 8.0;
  CHECK(std::fabs(noncentrality_simple(vec1(0.0), vec1(1.0), 1.0, family) -
                  oracle) < 1e-5);
}

TEST_CASE("noncentrality_contaminated") {
  const NormalMeanFamily family(1.0);
  ContaminationSpec spec;
  spec.d = vec1(0.8);
  spec.epsilon = 0.0;
  spec.y = 3.0;
  CHECK(std::fabs(noncentrality_contaminated(vec1(0.0), spec, 0.5, family) -
                  noncentrality_simple(vec1(0.0), vec1(0.8), 0.5, family)) <
        1e-12);

  // level case d = 0: quadratic in epsilon, equal to eps^2 u^T K^{-1} u
  spec.d = vec1(0.0);
  spec.epsilon = 0.2;
  spec.y = 2.0;
  const double quad = noncentrality_contaminated(vec1(0.0), spec, 0.5, family);
  const double expected =
      0.04 * 0.5 * if2_simple(2.0, vec1(0.0), 0.5, family);
  CHECK(std::fabs(quad - expected) < 1e-10);

  // frozen classical value
  spec.d = vec1(1.0);
  spec.epsilon = 0.1;
  spec.y = 5.0;
  CHECK(std::fabs(noncentrality_contaminated(vec1(0.0), spec, 0.0, family) -
                  2.25) < 1e-8);
}

TEST_CASE("noncentrality_composite") {
  const NormalFamily family;
  const Constraint c = pin_mu(0.0);
  ContaminationSpec null_spec;
  null_spec.d = vec2(0.0, 0.0);
  CHECK(noncentrality_composite(vec2(0.0, 1.0), null_spec, 0.5, family, c) <
        1e-15);

  // sigma drift does not enter the mu test
  ContaminationSpec drift;
  drift.d = vec2(0.3, 0.7);
  const double sig = 2.0;
  const double delta =
      noncentrality_composite(vec2(0.0, sig), drift, 0.0, family, c);
  CHECK(std::fabs(delta - 0.09 / (sig * sig)) < 1e-8);

  // full pin reduces to the simple-test noncentrality
  const Constraint full = Constraint::fix_components({0, 1}, vec2(0.0, 1.0), 2);
  ContaminationSpec mix;
  mix.d = vec2(0.4, -0.2);
  mix.epsilon = 0.1;
  mix.y = 2.5;
  const double composite =
      noncentrality_composite(vec2(0.0, 1.0), mix, 0.5, family, full);
  const double simple =
      noncentrality_contaminated(vec2(0.0, 1.0), mix, 0.5, family);
  CHECK(std::fabs(composite - simple) < 1e-10 * (1.0 + simple));
}

TEST_CASE("contiguous_power") {
  CHECK(std::fabs(contiguous_power(1, 0.0, 0.05) - 0.05) < 1e-10);
  const double t = chi2_quantile(0.05, 1);
  const double oracle = 0.5 * std::erfc((std::sqrt(t) - 2.0) / std::sqrt(2.0)) +
                        0.5 * std::erfc((std::sqrt(t) + 2.0) / std::sqrt(2.0));
  CHECK(std::fabs(contiguous_power(1, 4.0, 0.05) - oracle) < 1e-4);
  double prev = 0.0;
  for (double d = 0.0; d <= 30.0; d += 1.3) {
    const double p = contiguous_power(1, d, 0.05);
    CHECK(p >= prev - 1e-13);
    prev = p;
  }
}

TEST_CASE("pif_simple") {
  const NormalMeanFamily family(1.0);
  CHECK(pif_simple(2.0, vec1(0.0), vec1(0.0), 0.5, family, 0.05) == 0.0);
  CHECK(std::fabs(pif_simple(0.0, vec1(0.0), vec1(1.0), 0.5, family, 0.05)) <
        1e-14);

  SUBCASE("finite-difference cross-check through the power chain") {
    const double beta = 0.5, y = 2.0, h = 1e-4;
    const VectorXd d = vec1(1.0);
    auto power_at = [&](double eps) {
      ContaminationSpec spec;
      spec.d = d;
      spec.epsilon = eps;
      spec.y = y;
      return contiguous_power(
          1, noncentrality_contaminated(vec1(0.0), spec, beta, family), 0.05);
    };
    const double fd = (power_at(h) - power_at(0.0)) / h;
    const double formula = pif_simple(y, vec1(0.0), d, beta, family, 0.05);
    CHECK(std::fabs(fd - formula) < 1e-3);
  }
  SUBCASE("unbounded at beta = 0, bounded at beta = 0.5") {
    double sup = 0.0;
    for (double y = -30.0; y <= 30.0; y += 0.05)
      sup = std::max(sup,
                     std::fabs(pif_simple(y, vec1(0.0), vec1(1.0), 0.5, family,
                                          0.05)));
    CHECK(sup > 0.0);
    CHECK(std::fabs(pif_simple(1e6, vec1(0.0), vec1(1.0), 0.5, family, 0.05)) <
          1e-6);
    // classical: linear growth in y
    const double p1 = pif_simple(1000.0, vec1(0.0), vec1(1.0), 0.0, family,
                                 0.05);
    const double p2 = pif_simple(2000.0, vec1(0.0), vec1(1.0), 0.0, family,
                                 0.05);
    CHECK(std::fabs(p2 / p1 - 2.0) < 1e-8);
  }
  SUBCASE("small-drift linearity") {
    const double y = 2.0, beta = 0.5;
    const double t = chi2_quantile(0.05, 1);
    const InfoMatrices info = info_matrices(vec1(0.0), beta, family);
    const double linear = info.J(0, 0) / info.K(0, 0) *
                          beta_score(y, vec1(0.0), beta, family)[0];
    const double limit = pif_series(0.0, 1, t) * linear;
    const double at3 = pif_simple(y, vec1(0.0), vec1(1e-3), beta, family, 0.05);
    const double at5 = pif_simple(y, vec1(0.0), vec1(1e-5), beta, family, 0.05);
    CHECK(std::fabs(at3 / 1e-3 - limit) < 1e-2 * (1.0 + std::fabs(limit)));
    CHECK(std::fabs(at5 / 1e-5 - limit) < 1e-4 * (1.0 + std::fabs(limit)));
  }
}

TEST_CASE("pif_composite") {
  const NormalFamily family;
  const Constraint c = pin_mu(0.0);
  const VectorXd theta = vec2(0.0, 1.0);
  CHECK(pif_composite(2.0, theta, vec2(0.0, 0.0), 0.5, family, c, 0.05) == 0.0);
  CHECK(std::fabs(pif_composite(0.0, theta, vec2(1.0, 0.0), 0.5, family, c,
                                0.05)) < 1e-14);

  SUBCASE("finite-difference cross-check") {
    const double beta = 0.5, y = 2.0, h = 1e-4;
    const VectorXd d = vec2(1.0, 0.0);
    auto power_at = [&](double eps) {
      ContaminationSpec spec;
      spec.d = d;
      spec.epsilon = eps;
      spec.y = y;
      return contiguous_power(
          1, noncentrality_composite(theta, spec, beta, family, c), 0.05);
    };
    const double fd = (power_at(h) - power_at(0.0)) / h;
    const double formula = pif_composite(y, theta, d, beta, family, c, 0.05);
    CHECK(std::fabs(fd - formula) < 1e-3);
  }
}

TEST_CASE("level influence functions vanish identically") {
  CHECK(lif_simple() == 0.0);
  CHECK(lif_composite() == 0.0);

  // FD slope of the level in epsilon is O(h): quadratic perturbation
  const NormalMeanFamily family(1.0);
  auto level_at = [&](double eps) {
    ContaminationSpec spec;
    spec.d = vec1(0.0);
    spec.epsilon = eps;
    spec.y = 2.0;
    return contiguous_power(
        1, noncentrality_contaminated(vec1(0.0), spec, 0.5, family), 0.05);
  };
  const double h = 1e-4;
  const double slope = (level_at(h) - level_at(0.0)) / h;
  CHECK(std::fabs(slope) < 1e-3);
  const double slope2 = (level_at(2.0 * h) - level_at(0.0)) / (2.0 * h);
  CHECK(std::fabs(slope2) > std::fabs(slope) * 1.5);  // slope shrinks with h
}
