#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clickcascade/analysis.hpp"
#include "clickcascade/bayes_ab.hpp"
#include "clickcascade/error.hpp"
#include "clickcascade/io.hpp"
#include "clickcascade/lasso.hpp"
#include "clickcascade/netgen.hpp"
#include "clickcascade/pipeline.hpp"
#include "clickcascade/textfeat.hpp"

namespace py = pybind11;
namespace cc = clickcascade;

namespace {

py::dict fit_dict(const cc::lasso::LassoFit& f) {
  py::dict d;
  d["w0"] = f.w0;
  d["weights"] = f.weights;
  d["lambda"] = f.lambda;
  d["iterations"] = f.iterations_used;
  d["converged"] = f.converged;
  return d;
}

cc::analysis::FeatureDistribution distribution(std::vector<double> values) {
  return {std::move(values), true};
}

py::list edge_list(const cc::netgen::Graph& g) {
  py::list out;
  for (const auto& [i, j] : g.edges()) out.append(py::make_tuple(i, j));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Headline features, LASSO click models, Bayesian A/B tests and cascade simulation";

  auto invalid = py::register_exception<cc::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<cc::ValidationError>(m, "ValidationError", invalid.ptr());

  m.def("tokenize", &cc::textfeat::tokenize, py::arg("text"));
  m.def("extract_formal", &cc::textfeat::extract_formal, py::arg("headline"));
  m.def(
      "classify_headline",
      [](const std::string& h) { return std::string(cc::textfeat::to_string(cc::textfeat::classify_headline_type(h))); },
      py::arg("headline"));

  m.def(
      "prob_b_beats_a",
      [](double alpha_a, double beta_a, double alpha_b, double beta_b) {
        return cc::bayes_ab::prob_b_beats_a({alpha_a, beta_a}, {alpha_b, beta_b});
      },
      py::arg("alpha_a"), py::arg("beta_a"), py::arg("alpha_b"), py::arg("beta_b"));
  m.def(
      "prob_b_beats_a_mc",
      [](double alpha_a, double beta_a, double alpha_b, double beta_b, std::uint64_t n_samples,
         std::uint64_t seed) {
        return cc::bayes_ab::prob_b_beats_a_mc({alpha_a, beta_a}, {alpha_b, beta_b}, n_samples, seed);
      },
      py::arg("alpha_a"), py::arg("beta_a"), py::arg("alpha_b"), py::arg("beta_b"),
      py::arg("n_samples") = 1'000'000, py::arg("seed") = 0);
  m.def(
      "ab_decide",
      [](std::int64_t clicks_a, std::int64_t impressions_a, std::int64_t clicks_b,
         std::int64_t impressions_b, double threshold) {
        const auto d = cc::bayes_ab::decide(cc::bayes_ab::ArmStats::from_impressions(clicks_a, impressions_a),
                                            cc::bayes_ab::ArmStats::from_impressions(clicks_b, impressions_b),
                                            threshold);
        py::dict out;
        out["action"] = std::string(cc::bayes_ab::to_string(d.action));
        out["probability_b_beats_a"] = d.probability_b_beats_a;
        out["uplift"] = d.uplift;
        out["threshold"] = d.threshold;
        return out;
      },
      py::arg("clicks_a"), py::arg("impressions_a"), py::arg("clicks_b"), py::arg("impressions_b"),
      py::arg("threshold") = 0.95);
  m.def(
      "z_test",
      [](std::int64_t clicks_a, std::int64_t impressions_a, std::int64_t clicks_b,
         std::int64_t impressions_b, double significance) {
        const auto z = cc::bayes_ab::z_test(cc::bayes_ab::ArmStats::from_impressions(clicks_a, impressions_a),
                                            cc::bayes_ab::ArmStats::from_impressions(clicks_b, impressions_b),
                                            significance);
        py::dict out;
        out["z"] = z.z;
        out["p_value"] = z.p_value;
        out["critical"] = z.critical;
        out["verdict"] = std::string(cc::bayes_ab::to_string(z.verdict));
        return out;
      },
      py::arg("clicks_a"), py::arg("impressions_a"), py::arg("clicks_b"), py::arg("impressions_b"),
      py::arg("significance") = 0.05);

  m.def(
      "lasso_fit",
      [](Eigen::MatrixXd x, Eigen::VectorXd y, double lambda, bool standardize, double tolerance,
         std::size_t max_iterations) {
        const cc::lasso::RegressionProblem p(std::move(x), std::move(y), standardize);
        return fit_dict(cc::lasso::fit(p, lambda, {tolerance, max_iterations}));
      },
      py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("standardize") = true,
      py::arg("tolerance") = 1e-7, py::arg("max_iterations") = 10'000);
  m.def(
      "lasso_lambda_max",
      [](Eigen::MatrixXd x, Eigen::VectorXd y, bool standardize) {
        return cc::lasso::lambda_max(cc::lasso::RegressionProblem(std::move(x), std::move(y), standardize));
      },
      py::arg("x"), py::arg("y"), py::arg("standardize") = true);
  m.def(
      "lasso_cv",
      [](Eigen::MatrixXd x, Eigen::VectorXd y, std::size_t k_folds, std::size_t grid_size,
         double grid_ratio, std::uint64_t seed, const std::string& rule) {
        if (rule != "min" && rule != "one_se") throw cc::InvalidInput("rule must be 'min' or 'one_se'");
        const cc::lasso::RegressionProblem p(std::move(x), std::move(y));
        const auto grid = cc::lasso::lambda_grid(cc::lasso::lambda_max(p), grid_size, grid_ratio);
        const auto report = cc::lasso::cross_validate(p, grid, k_folds, seed);
        const auto sel = cc::lasso::select_lambda(
            p, report, rule == "min" ? cc::lasso::SelectionRule::min : cc::lasso::SelectionRule::one_se);
        py::dict out = fit_dict(sel.fit);
        out["grid_index"] = sel.grid_index;
        out["lambda_grid"] = report.lambda_grid;
        out["cv_errors"] = report.cv_errors;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("k_folds") = 5, py::arg("grid_size") = 100,
      py::arg("grid_ratio") = 1e-3, py::arg("seed") = 0, py::arg("rule") = "min");

  m.def(
      "erdos_renyi", [](std::size_t n, double p, std::uint64_t seed) { return edge_list(cc::netgen::erdos_renyi(n, p, seed)); },
      py::arg("n"), py::arg("p"), py::arg("seed") = 0);
  m.def(
      "barabasi_albert",
      [](std::size_t n, std::size_t k, std::uint64_t seed) { return edge_list(cc::netgen::barabasi_albert(n, k, seed)); },
      py::arg("n"), py::arg("m"), py::arg("seed") = 0);
  m.def(
      "sbm",
      [](std::vector<std::size_t> sizes, std::vector<std::vector<double>> rates, std::uint64_t seed) {
        return edge_list(cc::netgen::sbm(sizes, rates, seed));
      },
      py::arg("block_sizes"), py::arg("block_matrix"), py::arg("seed") = 0);

  m.def(
      "shannon_entropy", [](std::vector<double> v) { return cc::analysis::shannon_entropy(distribution(std::move(v))); },
      py::arg("distribution"));
  m.def(
      "gini", [](std::vector<double> v) { return cc::analysis::gini(distribution(std::move(v))); },
      py::arg("distribution"));
  m.def(
      "polyfit_r2",
      [](std::vector<double> series, std::size_t degree) {
        const auto f = cc::analysis::polyfit_r2(series, degree);
        return py::make_tuple(f.coefficients, f.r_squared);
      },
      py::arg("series"), py::arg("degree"));

  m.def(
      "_simulate_json",
      [](const std::string& config, std::size_t threads) {
        const auto cfg = cc::io::parse_experiment_config(config);
        const auto model = cc::io::resolve_model(cfg);
        cc::sim::validate(cfg.simulation, model);
        std::vector<cc::sim::ReplicaResult> results;
        {
          py::gil_scoped_release release;
          results = cc::sim::run_experiment(cfg.simulation, model, threads);
        }
        return cc::io::results_json(cfg, results);
      },
      py::arg("config"), py::arg("threads") = 0);
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int status = cc::pipeline::run_pipeline(args, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"));
}
