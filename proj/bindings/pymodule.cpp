#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "raodpd/distributions.hpp"
#include "raodpd/estimation.hpp"
#include "raodpd/model.hpp"
#include "raodpd/normal.hpp"
#include "raodpd/rao_test.hpp"
#include "raodpd/robustness.hpp"
#include "raodpd/simulation.hpp"

namespace py = pybind11;
using namespace raodpd;

namespace {

Sample to_sample(const std::vector<double>& data) { return Sample(data); }

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

py::dict row_to_dict(const ExperimentRow& row) {
  py::dict d;
  d["scenario"] = row.scenario;
  d["beta"] = row.beta;
  d["n"] = row.n;
  d["epsilon"] = row.epsilon;
  d["rate"] = row.rate;
  d["mc_se"] = row.mc_se;
  d["R"] = row.replications;
  d["seed"] = row.seed;
  d["failures"] = row.failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(raodpd, m) {
  m.doc() = "Robust score tests built on density power divergence weighting";

  // chi-square machinery
  m.def("chi2_survival", &chi2_survival, py::arg("x"), py::arg("df"));
  m.def("chi2_quantile", &chi2_quantile, py::arg("alpha"), py::arg("df"));
  m.def("poisson_weight", &poisson_weight, py::arg("s"), py::arg("k"));
  m.def(
      "noncentral_chi2_survival",
      [](double x, int df, double noncentrality) {
        return noncentral_chi2_survival(x, ChiSqSpec{df, noncentrality});
      },
      py::arg("x"), py::arg("df"), py::arg("noncentrality"));
  m.def("pif_series", &pif_series, py::arg("s"), py::arg("df"),
        py::arg("threshold"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  // normal-model closed forms
  m.def(
      "u1",
      [](double x, double mu, double sigma, double beta) {
        return u1(x, NormalParams{mu, sigma}, beta);
      },
      py::arg("x"), py::arg("mu"), py::arg("sigma"), py::arg("beta"));
  m.def(
      "u2",
      [](double x, double mu, double sigma, double beta) {
        return u2(x, NormalParams{mu, sigma}, beta);
      },
      py::arg("x"), py::arg("mu"), py::arg("sigma"), py::arg("beta"));
  m.def("tau", &tau, py::arg("beta"));
  m.def(
      "k_matrix",
      [](double mu, double sigma, double beta) -> Eigen::Matrix2d {
        return k_matrix(NormalParams{mu, sigma}, beta);
      },
      py::arg("mu"), py::arg("sigma"), py::arg("beta"));
  m.def(
      "simple_mean_stat",
      [](const std::vector<double>& data, double mu0, double sigma0,
         double beta) {
        return simple_mean_stat(to_sample(data), mu0, sigma0, beta);
      },
      py::arg("data"), py::arg("mu0"), py::arg("sigma0"), py::arg("beta"));
  m.def(
      "simple_joint_stat",
      [](const std::vector<double>& data, double mu0, double sigma0,
         double beta) {
        const JointStat s = simple_joint_stat(to_sample(data), mu0, sigma0, beta);
        return py::make_tuple(s.total, s.mean_part, s.sigma_part);
      },
      py::arg("data"), py::arg("mu0"), py::arg("sigma0"), py::arg("beta"));
  m.def(
      "s2_mu0",
      [](const std::vector<double>& data, double mu0) {
        return s2_mu0(to_sample(data), mu0);
      },
      py::arg("data"), py::arg("mu0"));
  m.def(
      "sigma_tilde",
      [](const std::vector<double>& data, double mu0, double beta) {
        return sigma_tilde(to_sample(data), mu0, beta);
      },
      py::arg("data"), py::arg("mu0"), py::arg("beta"));
  m.def(
      "composite_mean_stat",
      [](const std::vector<double>& data, double mu0, double beta) {
        const CompositeMeanStat s = composite_mean_stat(to_sample(data), mu0, beta);
        return py::make_tuple(s.statistic, s.sigma_tilde);
      },
      py::arg("data"), py::arg("mu0"), py::arg("beta"));
  m.def("telephone_data", [] {
    const Sample& s = telephone_data();
    return std::vector<double>(s.begin(), s.end());
  });

  // test reports
  py::class_<TestReport>(m, "TestReport")
      .def_readonly("statistic", &TestReport::statistic)
      .def_readonly("df", &TestReport::df)
      .def_readonly("p_value", &TestReport::p_value)
      .def_readonly("alpha", &TestReport::alpha)
      .def_readonly("reject", &TestReport::reject)
      .def_readonly("beta", &TestReport::beta)
      .def_property_readonly("estimator",
                             [](const TestReport& r) -> py::object {
                               if (!r.estimator_used) return py::none();
                               return py::cast(*r.estimator_used);
                             })
      .def("__repr__", [](const TestReport& r) {
        return "<TestReport statistic=" + std::to_string(r.statistic) +
               " df=" + std::to_string(r.df) +
               " p_value=" + std::to_string(r.p_value) +
               " reject=" + (r.reject ? std::string("True") : "False") + ">";
      });

  m.def(
      "test_simple_mean",
      [](const std::vector<double>& data, double mu0, double sigma0,
         double beta, double alpha) {
        const NormalMeanFamily family(sigma0);
        return rao_simple(to_sample(data), vec1(mu0), beta, family, alpha);
      },
      py::arg("data"), py::arg("mu0"), py::arg("sigma0"), py::arg("beta"),
      py::arg("alpha") = 0.05);
  m.def(
      "test_simple_joint",
      [](const std::vector<double>& data, double mu0, double sigma0,
         double beta, double alpha) {
        const NormalFamily family;
        return rao_simple(to_sample(data), vec2(mu0, sigma0), beta, family,
                          alpha);
      },
      py::arg("data"), py::arg("mu0"), py::arg("sigma0"), py::arg("beta"),
      py::arg("alpha") = 0.05);
  m.def(
      "test_composite",
      [](const std::vector<double>& data, double mu0, double beta,
         double alpha) {
        const NormalFamily family;
        return rao_composite_partition(to_sample(data), vec1(mu0), beta, family,
                                       alpha);
      },
      py::arg("data"), py::arg("mu0"), py::arg("beta"),
      py::arg("alpha") = 0.05);

  // estimation
  m.def(
      "estimate_normal",
      [](const std::vector<double>& data, double beta) {
        const NormalFamily family;
        const Sample sample = to_sample(data);
        const EstimateReport rep =
            mdpde(sample, beta, family, family.initial_guess(sample));
        return py::make_tuple(rep.theta_hat[0], rep.theta_hat[1], rep.converged);
      },
      py::arg("data"), py::arg("beta"));

  // robustness profiles (normal mean-only null)
  m.def(
      "if2_simple_mean",
      [](double y, double mu0, double sigma0, double beta) {
        const NormalMeanFamily family(sigma0);
        return if2_simple(y, vec1(mu0), beta, family);
      },
      py::arg("y"), py::arg("mu0"), py::arg("sigma0"), py::arg("beta"));
  m.def(
      "pif_simple_mean",
      [](double y, double mu0, double sigma0, double d, double beta,
         double alpha) {
        const NormalMeanFamily family(sigma0);
        return pif_simple(y, vec1(mu0), vec1(d), beta, family, alpha);
      },
      py::arg("y"), py::arg("mu0"), py::arg("sigma0"), py::arg("d"),
      py::arg("beta"), py::arg("alpha") = 0.05);
  m.def("contiguous_power", &contiguous_power, py::arg("df"),
        py::arg("noncentrality"), py::arg("alpha"));
  m.def("lif_simple", &lif_simple);
  m.def("lif_composite", &lif_composite);

  // simulation
  m.def(
      "run_experiment",
      [](const std::string& scenario, const std::vector<double>& betas,
         const std::vector<int>& ns, int reps, double alpha, uint64_t seed,
         double epsilon, double mu0, double sigma0, double contam_mean,
         double contam_sd, const std::string& mixing, int threads) {
        ExperimentConfig config;
        config.scenario =
            scenario == "composite" ? Scenario::Composite : Scenario::Simple;
        config.betas = betas;
        config.ns = ns;
        config.replications = reps;
        config.alpha = alpha;
        config.seed = seed;
        config.epsilon = epsilon;
        config.mu0 = mu0;
        config.sigma0 = sigma0;
        config.data_law = MixtureSpec::contaminated(mu0, sigma0, epsilon,
                                                    contam_mean, contam_sd);
        config.mixing = mixing == "per-obs" ? MixingScheme::PerObservation
                                            : MixingScheme::FixedFraction;
        config.threads = threads;
        const ExperimentResult result = run_experiment(config);
        py::list rows;
        for (const auto& row : result.rows) rows.append(row_to_dict(row));
        return rows;
      },
      py::arg("scenario"), py::arg("betas"), py::arg("ns"),
      py::arg("reps") = 20000, py::arg("alpha") = 0.05, py::arg("seed") = 1,
      py::arg("epsilon") = 0.0, py::arg("mu0") = 0.0, py::arg("sigma0") = 1.0,
      py::arg("contam_mean") = -4.5, py::arg("contam_sd") = 1.0,
      py::arg("mixing") = "fixed", py::arg("threads") = 0);
}
