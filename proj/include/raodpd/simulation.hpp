#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "raodpd/rng.hpp"
#include "raodpd/sample.hpp"

namespace raodpd {

// Finite normal mixture: weights sum to one, standard deviations positive.
struct MixtureComponent {
  double mean = 0.0;
  double sd = 1.0;
};

struct MixtureSpec {
  std::vector<double> weights;
  std::vector<MixtureComponent> components;

  void validate() const;
  static MixtureSpec pure(double mean, double sd);
  static MixtureSpec contaminated(double mean, double sd, double epsilon,
                                  double contam_mean, double contam_sd);
};

// How mixture components are assigned to observations:
//  - PerObservation: each observation picks its component at random by the
//    weights (the sample_mixture contract).
//  - FixedFraction: component counts are fixed at round(w_c * n) via largest
//    remainder, the deterministic 10%-outlier design of the reference
//    experiments. This is the experiment engine's default.
enum class MixingScheme { PerObservation, FixedFraction };

// n i.i.d. draws with the component of each observation chosen by the
// weight distribution. Consumes exactly two uniforms per observation.
Sample sample_mixture(const MixtureSpec& spec, int n, CounterRng& rng);

// Stratified variant with deterministic component counts.
Sample sample_mixture_fixed(const MixtureSpec& spec, int n, CounterRng& rng);

enum class Scenario { Simple, Composite };

struct ExperimentConfig {
  Scenario scenario = Scenario::Simple;
  std::vector<double> betas;
  std::vector<int> ns;
  int replications = 20000;
  double alpha = 0.05;
  MixtureSpec data_law;
  double mu0 = 0.0;
  double sigma0 = 1.0;  // known scale of the simple scenario
  uint64_t seed = 0;
  double epsilon = 0.0;  // contamination mass, provenance column only
  MixingScheme mixing = MixingScheme::FixedFraction;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct ExperimentRow {
  std::string scenario;
  double beta = 0.0;
  int n = 0;
  double epsilon = 0.0;
  double rate = 0.0;   // rejections / (R - failures)
  double mc_se = 0.0;  // sqrt(rate (1 - rate) / (R - failures))
  int replications = 0;
  uint64_t seed = 0;
  int failures = 0;  // estimator failures, excluded from the rate
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
};

// Runs the scenario statistic over every (beta, n) cell. Replication j of
// cell (i, k) draws from a stream keyed by (seed, i, k, j), so results do
// not depend on execution order or the number of threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV with header scenario,beta,n,epsilon,rate,mc_se,R,seed,failures and
// floating-point columns at six significant digits.
void write_csv(std::ostream& os, const ExperimentResult& result);

namespace detail {
// Per-replication statistics of the two scenarios (closed normal forms).
double scenario_simple_stat(const Sample& sample, double mu0, double sigma0,
                            double beta);
// Throws NumericError when the scale equation has no bracketed root.
double scenario_composite_stat(const Sample& sample, double mu0, double beta);
}  // namespace detail

}  // namespace raodpd
