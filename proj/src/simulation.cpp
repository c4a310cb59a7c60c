#include "raodpd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "raodpd/distributions.hpp"
#include "raodpd/errors.hpp"
#include "raodpd/normal.hpp"

namespace raodpd {

namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t key1, uint64_t key2,
                       uint64_t key3) {
  uint64_t s = mix64(seed + kGolden);
  s = mix64(s ^ (key1 + 1) * kGolden);
  s = mix64(s ^ (key2 + 1) * kGolden);
  s = mix64(s ^ (key3 + 1) * kGolden);
  state_ = s;
}

uint64_t CounterRng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double CounterRng::next_uniform() {
  // 53-bit mantissa, offset half a grid step: values lie strictly in (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() { return normal_quantile(next_uniform()); }

double CounterRng::next_normal(double mean, double sd) {
  return mean + sd * next_normal();
}

void MixtureSpec::validate() const {
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("MixtureSpec: weights/components mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("MixtureSpec: negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureSpec: weights must sum to 1");
  for (const auto& c : components)
    if (!(c.sd > 0.0))
      throw std::invalid_argument("MixtureSpec: sd must be > 0");
}

MixtureSpec MixtureSpec::pure(double mean, double sd) {
  MixtureSpec spec;
  spec.weights = {1.0};
  spec.components = {{mean, sd}};
  return spec;
}

MixtureSpec MixtureSpec::contaminated(double mean, double sd, double epsilon,
                                      double contam_mean, double contam_sd) {
  if (epsilon == 0.0) return pure(mean, sd);
  MixtureSpec spec;
  spec.weights = {1.0 - epsilon, epsilon};
  spec.components = {{mean, sd}, {contam_mean, contam_sd}};
  return spec;
}

Sample sample_mixture(const MixtureSpec& spec, int n, CounterRng& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  std::vector<double> obs;
  obs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    double cum = 0.0;
    size_t pick = spec.weights.size() - 1;
    for (size_t c = 0; c < spec.weights.size(); ++c) {
      cum += spec.weights[c];
      if (u <= cum) {
        pick = c;
        break;
      }
    }
    obs.push_back(rng.next_normal(spec.components[pick].mean,
                                  spec.components[pick].sd));
  }
  return Sample(std::move(obs));
}

Sample sample_mixture_fixed(const MixtureSpec& spec, int n, CounterRng& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("sample_mixture_fixed: n must be >= 1");

  // Largest-remainder apportionment of the component counts.
  const size_t nc = spec.weights.size();
  std::vector<int> counts(nc);
  std::vector<std::pair<double, size_t>> rema(nc);
  int assigned = 0;
  for (size_t c = 0; c < nc; ++c) {
    const double exact = spec.weights[c] * n;
    counts[c] = static_cast<int>(std::floor(exact));
    assigned += counts[c];
    rema[c] = {exact - std::floor(exact), c};
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int left = n - assigned, i = 0; left > 0; --left, ++i)
    ++counts[rema[static_cast<size_t>(i)].second];

  std::vector<double> obs;
  obs.reserve(n);
  for (size_t c = 0; c < nc; ++c)
    for (int i = 0; i < counts[c]; ++i)
      obs.push_back(rng.next_normal(spec.components[c].mean,
                                    spec.components[c].sd));
  return Sample(std::move(obs));
}

void ExperimentConfig::validate() const {
  data_law.validate();
  if (betas.empty()) throw std::invalid_argument("config: empty beta list");
  for (double b : betas)
    if (b < 0.0) throw std::invalid_argument("config: beta must be >= 0");
  if (ns.empty()) throw std::invalid_argument("config: empty n list");
  const int n_min = scenario == Scenario::Composite ? 2 : 1;
  for (int n : ns)
    if (n < n_min) throw std::invalid_argument("config: sample size too small");
  if (replications < 1)
    throw std::invalid_argument("config: replications must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("config: alpha must be in (0,1)");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("config: sigma0 must be > 0");
}

namespace detail {

double scenario_simple_stat(const Sample& sample, double mu0, double sigma0,
                            double beta) {
  return simple_mean_stat(sample, mu0, sigma0, beta);
}

double scenario_composite_stat(const Sample& sample, double mu0, double beta) {
  return composite_mean_stat(sample, mu0, beta).statistic;
}

}  // namespace detail

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const double threshold = chi2_quantile(config.alpha, 1);
  const int n_threads =
      config.threads > 0
          ? config.threads
          : std::max(1u, std::thread::hardware_concurrency());

  ExperimentResult result;
  for (size_t i = 0; i < config.betas.size(); ++i) {
    for (size_t k = 0; k < config.ns.size(); ++k) {
      const double beta = config.betas[i];
      const int n = config.ns[k];

      // Each replication owns a stream keyed by (seed, i, k, j); the cell
      // totals are plain integer sums, so any partition over threads gives
      // the identical result.
      auto run_chunk = [&](int lo, int hi) {
        std::pair<long, long> acc{0, 0};  // rejections, failures
        for (int j = lo; j < hi; ++j) {
          CounterRng rng(config.seed, i, k, static_cast<uint64_t>(j));
          const Sample sample =
              config.mixing == MixingScheme::PerObservation
                  ? sample_mixture(config.data_law, n, rng)
                  : sample_mixture_fixed(config.data_law, n, rng);
          try {
            const double stat =
                config.scenario == Scenario::Simple
                    ? detail::scenario_simple_stat(sample, config.mu0,
                                                   config.sigma0, beta)
                    : detail::scenario_composite_stat(sample, config.mu0, beta);
            if (stat > threshold) ++acc.first;
          } catch (const NumericError&) {
            ++acc.second;
          }
        }
        return acc;
      };

      long rejections = 0;
      long failures = 0;
      if (n_threads == 1 || config.replications < 64) {
        std::tie(rejections, failures) = run_chunk(0, config.replications);
      } else {
        std::vector<std::future<std::pair<long, long>>> futs;
        const int chunk = (config.replications + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
          const int lo = t * chunk;
          const int hi = std::min(config.replications, lo + chunk);
          if (lo >= hi) break;
          futs.push_back(
              std::async(std::launch::async, run_chunk, lo, hi));
        }
        for (auto& f : futs) {
          const auto part = f.get();
          rejections += part.first;
          failures += part.second;
        }
      }

      const long effective = config.replications - failures;
      if (effective <= 0)
        throw NumericError("run_experiment: every replication failed");
      ExperimentRow row;
      row.scenario =
          config.scenario == Scenario::Simple ? "simple" : "composite";
      row.beta = beta;
      row.n = n;
      row.epsilon = config.epsilon;
      row.rate = static_cast<double>(rejections) / effective;
      row.mc_se = std::sqrt(row.rate * (1.0 - row.rate) / effective);
      row.replications = config.replications;
      row.seed = config.seed;
      row.failures = static_cast<int>(failures);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

void write_csv(std::ostream& os, const ExperimentResult& result) {
  os << "scenario,beta,n,epsilon,rate,mc_se,R,seed,failures\n";
  char buf[256];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%d,%.6g,%.6g,%.6g,%d,%llu,%d\n",
                  row.scenario.c_str(), row.beta, row.n, row.epsilon, row.rate,
                  row.mc_se, row.replications,
                  static_cast<unsigned long long>(row.seed), row.failures);
    os << buf;
  }
}

}  // namespace raodpd
