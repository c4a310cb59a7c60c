#include "raodpd/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "raodpd/data_io.hpp"
#include "raodpd/distributions.hpp"
#include "raodpd/errors.hpp"
#include "raodpd/estimation.hpp"
#include "raodpd/normal.hpp"
#include "raodpd/rao_test.hpp"
#include "raodpd/robustness.hpp"
#include "raodpd/simulation.hpp"

namespace raodpd::cli {

namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Output sink: --out path or stdout.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DataError(path + ": cannot open for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

std::vector<double> parse_grid(const std::string& text) {
  double a = 0, b = 0, step = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 ||
      step <= 0 || b < a)
    throw std::invalid_argument("bad grid '" + text + "', expected a:b:step");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double x = a + i * step;
    if (x > b + 1e-9 * step) break;
    grid.push_back(x);
  }
  return grid;
}

MixtureSpec parse_mixture(const std::string& text) {
  MixtureSpec spec;
  std::istringstream parts(text);
  std::string item;
  while (std::getline(parts, item, ';')) {
    double m = 0, s = 0, w = 0;
    if (std::sscanf(item.c_str(), "%lf,%lf,%lf", &m, &s, &w) != 3)
      throw std::invalid_argument("bad mixture component '" + item +
                                  "', expected mean,sd,weight");
    spec.components.push_back({m, s});
    spec.weights.push_back(w);
  }
  spec.validate();
  return spec;
}

json report_to_json(const TestReport& report) {
  json j{{"statistic", report.statistic}, {"df", report.df},
         {"p_value", report.p_value},    {"alpha", report.alpha},
         {"reject", report.reject},      {"beta", report.beta}};
  if (report.estimator_used) {
    json arr = json::array();
    for (int i = 0; i < report.estimator_used->size(); ++i)
      arr.push_back((*report.estimator_used)[i]);
    j["estimator"] = arr;
  } else {
    j["estimator"] = nullptr;
  }
  return j;
}

void print_report(std::ostream& os, const TestReport& report,
                  const std::string& format) {
  if (format == "json") {
    os << report_to_json(report).dump(2) << "\n";
    return;
  }
  os << "statistic,df,p_value,alpha,reject,beta,estimator\n";
  std::string est;
  if (report.estimator_used) {
    for (int i = 0; i < report.estimator_used->size(); ++i) {
      if (i) est += ';';
      est += fmt6((*report.estimator_used)[i]);
    }
  }
  os << fmt6(report.statistic) << ',' << report.df << ','
     << fmt6(report.p_value) << ',' << fmt6(report.alpha) << ','
     << (report.reject ? "true" : "false") << ',' << fmt6(report.beta) << ','
     << est << "\n";
}

struct CommonFlags {
  std::string data;
  double mu0 = 0.0;
  double sigma0 = 0.0;
  double beta = 0.0;
  double alpha = 0.05;
  std::string format = "json";
  std::string out;
};

int cmd_test_simple(const CommonFlags& flags, bool joint) {
  const Sample sample = load_sample(flags.data);
  if (!(flags.sigma0 > 0.0))
    throw std::invalid_argument("test simple requires --sigma0 > 0");
  TestReport report;
  if (joint) {
    const NormalFamily family;
    VectorXd theta0(2);
    theta0 << flags.mu0, flags.sigma0;
    report = rao_simple(sample, theta0, flags.beta, family, flags.alpha);
  } else {
    const NormalMeanFamily family(flags.sigma0);
    VectorXd theta0(1);
    theta0 << flags.mu0;
    report = rao_simple(sample, theta0, flags.beta, family, flags.alpha);
  }
  Sink sink(flags.out);
  print_report(sink.stream(), report, flags.format);
  return 0;
}

int cmd_test_composite(const CommonFlags& flags) {
  const Sample sample = load_sample(flags.data);
  const NormalFamily family;
  VectorXd mu0(1);
  mu0 << flags.mu0;
  const TestReport report = rao_composite_partition(sample, mu0, flags.beta,
                                                    family, flags.alpha);
  Sink sink(flags.out);
  print_report(sink.stream(), report, flags.format);
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& grid_text,
              bool joint) {
  const Sample sample = load_sample(flags.data);
  const std::vector<double> grid = parse_grid(grid_text);
  Sink sink(flags.out);
  std::ostream& os = sink.stream();

  const bool composite = !(flags.sigma0 > 0.0);
  if (joint && composite)
    throw std::invalid_argument("--joint requires --sigma0");
  const int df = joint ? 2 : 1;
  const double threshold = chi2_quantile(flags.alpha, df);

  os << "beta,statistic,threshold,reject" << (composite ? ",sigma_tilde" : "")
     << "\n";
  for (double beta : grid) {
    double stat;
    std::optional<double> scale;
    if (composite) {
      const CompositeMeanStat c = composite_mean_stat(sample, flags.mu0, beta);
      stat = c.statistic;
      scale = c.sigma_tilde;
    } else if (joint) {
      stat = simple_joint_stat(sample, flags.mu0, flags.sigma0, beta).total;
    } else {
      stat = simple_mean_stat(sample, flags.mu0, flags.sigma0, beta);
    }
    os << fmt6(beta) << ',' << fmt17(stat) << ',' << fmt6(threshold) << ','
       << (stat > threshold ? "true" : "false");
    if (scale) os << ',' << fmt17(*scale);
    os << "\n";
  }
  return 0;
}

struct SimulateFlags {
  std::string scenario = "simple";
  std::vector<double> betas;
  std::string beta_grid;
  std::vector<int> ns;
  int reps = 20000;
  uint64_t seed = 1;
  double alpha = 0.05;
  double epsilon = 0.0;
  double mu0 = 0.0;
  double sigma0 = 1.0;
  double alt_mean = -0.5;
  std::string mixture;
  std::string mixing = "fixed";
  int threads = 0;
  std::string out;
};

int cmd_simulate(const SimulateFlags& flags, bool power) {
  ExperimentConfig config;
  config.scenario =
      flags.scenario == "composite" ? Scenario::Composite : Scenario::Simple;
  config.betas = flags.betas;
  if (!flags.beta_grid.empty()) config.betas = parse_grid(flags.beta_grid);
  if (config.betas.empty()) config.betas = {0.0};
  config.ns = flags.ns.empty() ? std::vector<int>{50} : flags.ns;
  config.replications = flags.reps;
  config.alpha = flags.alpha;
  config.mu0 = flags.mu0;
  config.sigma0 = flags.sigma0;
  config.seed = flags.seed;
  config.epsilon = flags.epsilon;
  config.mixing = flags.mixing == "per-obs" ? MixingScheme::PerObservation
                                            : MixingScheme::FixedFraction;
  config.threads = flags.threads;

  if (!flags.mixture.empty()) {
    config.data_law = parse_mixture(flags.mixture);
  } else if (power) {
    // Alternative centred off the null; contamination on the far side.
    config.data_law = MixtureSpec::contaminated(flags.alt_mean, flags.sigma0,
                                                flags.epsilon, 5.0, 1.0);
  } else {
    config.data_law = MixtureSpec::contaminated(flags.mu0, flags.sigma0,
                                                flags.epsilon, -4.5, 1.0);
  }

  const ExperimentResult result = run_experiment(config);
  Sink sink(flags.out);
  write_csv(sink.stream(), result);
  return 0;
}

struct InfluenceFlags {
  double beta = 0.0;
  double mu0 = 0.0;
  double sigma0 = 1.0;
  double alpha = 0.05;
  std::string y_grid = "-10:10:0.1";
  std::vector<double> d;
  bool composite = false;
  std::string out;
};

int cmd_influence(const InfluenceFlags& flags) {
  const std::vector<double> ys = parse_grid(flags.y_grid);
  Sink sink(flags.out);
  std::ostream& os = sink.stream();
  os << "y,if2,pif\n";

  if (flags.composite) {
    const NormalFamily family;
    VectorXd theta(2);
    theta << flags.mu0, flags.sigma0;
    const Constraint constraint = Constraint::fix_components(
        {0}, (VectorXd(1) << flags.mu0).finished(), 2);
    VectorXd d = VectorXd::Zero(2);
    for (size_t i = 0; i < flags.d.size() && i < 2; ++i)
      d[static_cast<int>(i)] = flags.d[i];
    for (double y : ys) {
      const double v2 = if2_composite(y, theta, flags.beta, family, constraint);
      const double pif =
          pif_composite(y, theta, d, flags.beta, family, constraint, flags.alpha);
      os << fmt6(y) << ',' << fmt17(v2) << ',' << fmt17(pif) << "\n";
    }
  } else {
    const NormalMeanFamily family(flags.sigma0);
    VectorXd theta(1);
    theta << flags.mu0;
    VectorXd d = VectorXd::Zero(1);
    if (!flags.d.empty()) d[0] = flags.d[0];
    for (double y : ys) {
      const double v2 = if2_simple(y, theta, flags.beta, family);
      const double pif =
          pif_simple(y, theta, d, flags.beta, family, flags.alpha);
      os << fmt6(y) << ',' << fmt17(v2) << ',' << fmt17(pif) << "\n";
    }
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Robust score tests under density power divergence weighting"};
  app.require_subcommand(1);

  CommonFlags flags;
  SimulateFlags sim;
  InfluenceFlags infl;
  bool joint = false;
  std::string grid_text = "0:1:0.02";

  auto add_common = [&](CLI::App* cmd, bool with_beta) {
    cmd->add_option("--data", flags.data, "input path or 'telephone'")
        ->required();
    cmd->add_option("--mu0", flags.mu0, "null mean");
    cmd->add_option("--sigma0", flags.sigma0, "known scale (> 0)");
    if (with_beta)
      cmd->add_option("--beta", flags.beta, "tuning parameter (>= 0)")
          ->check(CLI::NonNegativeNumber);
    cmd->add_option("--alpha", flags.alpha, "significance level");
    cmd->add_option("--format", flags.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", flags.out, "output file (default stdout)");
  };

  CLI::App* test = app.add_subcommand("test", "run a single test");
  test->require_subcommand(1);
  CLI::App* test_simple =
      test->add_subcommand("simple", "simple null (known parameters)");
  add_common(test_simple, true);
  test_simple->add_flag("--joint", joint,
                        "test (mu, sigma) jointly instead of the mean only");
  CLI::App* test_composite =
      test->add_subcommand("composite", "H0: mu = mu0, sigma estimated");
  add_common(test_composite, true);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "statistic over a beta grid (composite when --sigma0 absent)");
  add_common(sweep, false);
  sweep->add_option("--beta-grid", grid_text, "grid a:b:step");
  sweep->add_flag("--joint", joint, "sweep the joint two-parameter statistic");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo level/power study");
  simulate->require_subcommand(1);
  std::vector<CLI::App*> sim_cmds = {
      simulate->add_subcommand("level", "rejection rate under the null"),
      simulate->add_subcommand("power", "rejection rate off the null")};
  for (CLI::App* cmd : sim_cmds) {
    cmd->add_option("--scenario", sim.scenario, "simple or composite")
        ->check(CLI::IsMember({"simple", "composite"}));
    cmd->add_option("--beta", sim.betas, "tuning parameter (repeatable)");
    cmd->add_option("--beta-grid", sim.beta_grid, "grid a:b:step");
    cmd->add_option("--n-list", sim.ns, "sample sizes")->delimiter(',');
    cmd->add_option("--reps", sim.reps, "replications per cell");
    cmd->add_option("--seed", sim.seed, "stream seed");
    cmd->add_option("--alpha", sim.alpha, "significance level");
    cmd->add_option("--epsilon", sim.epsilon, "contamination mass")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--mu0", sim.mu0, "null mean");
    cmd->add_option("--sigma0", sim.sigma0, "null scale");
    cmd->add_option("--alt-mean", sim.alt_mean, "alternative mean (power)");
    cmd->add_option("--mixture", sim.mixture,
                    "full data law m1,s1,w1;m2,s2,w2 (overrides defaults)");
    cmd->add_option("--mixing", sim.mixing, "fixed or per-obs")
        ->check(CLI::IsMember({"fixed", "per-obs"}));
    cmd->add_option("--threads", sim.threads, "0 = all cores");
    cmd->add_option("--out", sim.out, "output file (default stdout)");
  }

  CLI::App* influence =
      app.add_subcommand("influence", "IF2 and PIF profiles over y");
  influence->add_option("--beta", infl.beta, "tuning parameter")
      ->check(CLI::NonNegativeNumber);
  influence->add_option("--mu0", infl.mu0, "null mean");
  influence->add_option("--sigma0", infl.sigma0, "null scale");
  influence->add_option("--alpha", infl.alpha, "significance level");
  influence->add_option("--y-grid", infl.y_grid, "grid a:b:step");
  influence->add_option("--d", infl.d, "contiguous drift components");
  influence->add_flag("--composite", infl.composite,
                      "composite (mu pinned, sigma nuisance) profiles");
  influence->add_option("--out", infl.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
    if (test_simple->parsed()) return cmd_test_simple(flags, joint);
    if (test_composite->parsed()) return cmd_test_composite(flags);
    if (sweep->parsed()) return cmd_sweep(flags, grid_text, joint);
    if (sim_cmds[0]->parsed()) return cmd_simulate(sim, false);
    if (sim_cmds[1]->parsed()) return cmd_simulate(sim, true);
    if (influence->parsed()) return cmd_influence(infl);
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return 0;
    }
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace raodpd::cli
