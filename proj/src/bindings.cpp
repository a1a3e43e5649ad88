// Python bindings for the truncexp core library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "truncexp/errors.hpp"
#include "truncexp/estimator.hpp"
#include "truncexp/model.hpp"
#include "truncexp/montecarlo.hpp"
#include "truncexp/sampling.hpp"

namespace py = pybind11;
using namespace truncexp;

namespace {

SecondMomentMethod method_from_string(const std::string& name) {
    if (name == "quadrature") {
        return SecondMomentMethod::Quadrature;
    }
    if (name == "closed-form") {
        return SecondMomentMethod::ClosedForm;
    }
    throw DomainError("unknown second-moment method '" + name +
                      "' (expected 'quadrature' or 'closed-form')");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rate estimation for exponential durations under double truncation";
    m.attr("__version__") = "0.1.0";

    // Exceptions. Translators run newest-first, so leaf types are registered
    // after their bases to ensure a derived C++ throw maps to the most
    // specific Python type.
    auto exc_error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    auto exc_data = py::register_exception<DataError>(m, "DataError", exc_error);
    py::register_exception<NoDataError>(m, "NoDataError", exc_data);
    py::register_exception<DegenerateDataError>(m, "DegenerateDataError", exc_data);
    py::register_exception<InconsistentStatsError>(m, "InconsistentStatsError",
                                                   exc_data);
    py::register_exception<ConfigParseError>(m, "ConfigParseError", exc_data);
    py::register_exception<ScenarioFailedError>(m, "ScenarioFailedError", exc_data);
    py::register_exception<NumericalError>(m, "NumericalError", exc_error);

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init([](double g, double s, double epsilon) {
                 ModelConfig cfg{g, s, epsilon};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("g"), py::arg("s"), py::arg("epsilon") = 1e-6)
        .def_readwrite("g", &ModelConfig::g)
        .def_readwrite("s", &ModelConfig::s)
        .def_readwrite("epsilon", &ModelConfig::epsilon)
        .def("__repr__", [](const ModelConfig& c) {
            return "ModelConfig(g=" + std::to_string(c.g) +
                   ", s=" + std::to_string(c.s) +
                   ", epsilon=" + std::to_string(c.epsilon) + ")";
        });

    py::class_<SufficientStats>(m, "SufficientStats")
        .def(py::init([](std::int64_t m_, double sum_x,
                         std::optional<double> sum_x2) {
                 SufficientStats st;
                 st.m = m_;
                 st.sum_x = sum_x;
                 st.sum_x2 = sum_x2;
                 st.validate();
                 return st;
             }),
             py::arg("m"), py::arg("sum_x"), py::arg("sum_x2") = std::nullopt)
        .def_readwrite("m", &SufficientStats::m)
        .def_readwrite("sum_x", &SufficientStats::sum_x)
        .def_readwrite("sum_x2", &SufficientStats::sum_x2)
        .def_static("from_durations", &SufficientStats::from_durations,
                    py::arg("durations"));

    py::enum_<Boundary>(m, "Boundary")
        .value("NONE", Boundary::None)
        .value("LOWER", Boundary::Lower)
        .value("UPPER", Boundary::Upper);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("theta_hat", &FitResult::theta_hat)
        .def_readonly("boundary", &FitResult::boundary)
        .def_readonly("n_hat", &FitResult::n_hat);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("theta_hat", &EstimateReport::theta_hat)
        .def_readonly("se_hat", &EstimateReport::se_hat)
        .def_readonly("n_hat", &EstimateReport::n_hat)
        .def_readonly("theta_srs", &EstimateReport::theta_srs)
        .def_readonly("se_srs", &EstimateReport::se_srs)
        .def_readonly("vif_hat", &EstimateReport::vif_hat)
        .def_readonly("boundary", &EstimateReport::boundary)
        .def_readonly("boundary_diag", &EstimateReport::boundary_diag);

    py::class_<LatentSample>(m, "LatentSample")
        .def_readonly("pairs", &LatentSample::pairs)
        .def("n", &LatentSample::n);

    py::class_<TruncatedSample>(m, "TruncatedSample")
        .def_readonly("pairs", &TruncatedSample::pairs)
        .def_readonly("n_latent", &TruncatedSample::n_latent)
        .def("m", &TruncatedSample::m)
        .def("stats", &TruncatedSample::stats);

    py::class_<SimulationScenario>(m, "SimulationScenario")
        .def(py::init([](double theta0, const ModelConfig& cfg, std::int64_t n,
                         int replications, std::uint64_t master_seed) {
                 SimulationScenario scn;
                 scn.theta0 = theta0;
                 scn.cfg = cfg;
                 scn.n = n;
                 scn.replications = replications;
                 scn.master_seed = master_seed;
                 return scn;
             }),
             py::arg("theta0"), py::arg("cfg"), py::arg("n"),
             py::arg("replications"), py::arg("master_seed"))
        .def_readwrite("theta0", &SimulationScenario::theta0)
        .def_readwrite("cfg", &SimulationScenario::cfg)
        .def_readwrite("n", &SimulationScenario::n)
        .def_readwrite("replications", &SimulationScenario::replications)
        .def_readwrite("master_seed", &SimulationScenario::master_seed);

    py::class_<ReplicationRecord>(m, "ReplicationRecord")
        .def_readonly("theta_hat", &ReplicationRecord::theta_hat)
        .def_readonly("se_hat", &ReplicationRecord::se_hat)
        .def_readonly("vif_hat", &ReplicationRecord::vif_hat)
        .def_readonly("boundary", &ReplicationRecord::boundary)
        .def_readonly("m", &ReplicationRecord::m)
        .def_readonly("empty", &ReplicationRecord::empty);

    py::class_<SimulationReport>(m, "SimulationReport")
        .def_readonly("mean_bias", &SimulationReport::mean_bias)
        .def_readonly("mean_sigma2_hat", &SimulationReport::mean_sigma2_hat)
        .def_readonly("n_var_sim", &SimulationReport::n_var_sim)
        .def_readonly("mean_vif", &SimulationReport::mean_vif)
        .def_readonly("boundary_count", &SimulationReport::boundary_count)
        .def_readonly("empty_count", &SimulationReport::empty_count)
        .def_readonly("replications", &SimulationReport::replications)
        .def_readonly("records", &SimulationReport::records);

    // Model operations.
    m.def("in_region", &in_region, py::arg("cfg"), py::arg("x"), py::arg("t"),
          "True when an individual born at t with duration x is observed");
    m.def("selection_prob", &selection_prob, py::arg("cfg"), py::arg("theta"),
          "Probability that a latent individual is observed");
    m.def("selection_prob_d1", &selection_prob_d1, py::arg("cfg"),
          py::arg("theta"), "First derivative of the selection probability");
    m.def("selection_prob_d2", &selection_prob_d2, py::arg("cfg"),
          py::arg("theta"), "Second derivative of the selection probability");
    m.def("selection_prob_d3", &selection_prob_d3, py::arg("cfg"),
          py::arg("theta"), "Third derivative of the selection probability");
    m.def("offset_c", &offset_c, py::arg("cfg"), py::arg("theta"),
          "Expected observed duration; the score's per-observation offset");
    m.def("joint_density", &joint_density, py::arg("cfg"), py::arg("theta"),
          py::arg("x"), py::arg("t"),
          "Joint density of (duration, birth time) given observation");
    m.def("marginal_density", &marginal_density, py::arg("cfg"),
          py::arg("theta"), py::arg("x"),
          "Marginal density of the observed duration");
    m.def("mean_truncated", &mean_truncated, py::arg("cfg"), py::arg("theta"),
          "Mean observed duration");
    m.def(
        "second_moment_truncated",
        [](const ModelConfig& cfg, double theta, const std::string& method) {
            return second_moment_truncated(cfg, theta,
                                           method_from_string(method));
        },
        py::arg("cfg"), py::arg("theta"), py::arg("method") = "quadrature",
        "Second moment of the observed duration ('quadrature' or 'closed-form')");
    m.def("log_likelihood", &log_likelihood, py::arg("cfg"), py::arg("stats"),
          py::arg("theta"), py::arg("n"),
          "Joint log-likelihood of rate and latent population size");

    // Sampling operations.
    m.def(
        "draw_latent",
        [](const ModelConfig& cfg, double theta0, std::int64_t n,
           std::uint64_t master_seed, std::uint64_t replication_index) {
            return draw_latent(cfg, theta0, n,
                               SeedSpec{master_seed, replication_index});
        },
        py::arg("cfg"), py::arg("theta0"), py::arg("n"),
        py::arg("master_seed"), py::arg("replication_index") = 0,
        "Draw n latent (duration, birth time) pairs");
    m.def("truncate", &truncexp::truncate, py::arg("cfg"), py::arg("latent"),
          "Keep only the pairs inside the observation region");
    m.def(
        "draw_truncated_poisson",
        [](const ModelConfig& cfg, double theta0, double n_mean,
           std::uint64_t master_seed, std::uint64_t replication_index) {
            return draw_truncated_poisson(
                cfg, theta0, n_mean, SeedSpec{master_seed, replication_index});
        },
        py::arg("cfg"), py::arg("theta0"), py::arg("n_mean"),
        py::arg("master_seed"), py::arg("replication_index") = 0,
        "Draw observed pairs directly with a Poisson-distributed count");

    // Estimator operations.
    m.def("psi", &psi, py::arg("cfg"), py::arg("theta"), py::arg("x"),
          py::arg("observed") = true, "Per-observation score contribution");
    m.def("psi_d1", &psi_d1, py::arg("cfg"), py::arg("theta"),
          "Expected negative derivative of the per-observation score");
    m.def("score", &score, py::arg("cfg"), py::arg("stats"), py::arg("theta"),
          "Estimating-equation value at theta");
    m.def("boundary_diagnostic", &boundary_diagnostic, py::arg("cfg"),
          py::arg("stats"),
          "Positive when the estimate lies above the lower bound");
    m.def("fit_mle", &fit_mle, py::arg("cfg"), py::arg("stats"),
          "Solve the estimating equation for the rate");
    m.def("estimate_se", &estimate_se, py::arg("cfg"), py::arg("stats"),
          py::arg("theta_hat"), "Standard error of the rate estimate");
    m.def("fit_srs", &fit_srs, py::arg("stats"),
          "Rate estimate and standard error ignoring truncation");
    m.def("vif_hat",
          static_cast<double (*)(double, double)>(&vif_hat),
          py::arg("se_hat"), py::arg("se_srs"),
          "Variance-inflation factor (se_hat / se_srs) squared");
    m.def("estimate", &estimate, py::arg("cfg"), py::arg("stats"),
          "Full estimation report");

    // Monte Carlo operations.
    m.def("run_replication", &run_replication, py::arg("scenario"),
          py::arg("replication_index"),
          "Run one simulation replication (raises NoDataError if empty)");
    m.def("run_scenario", &run_scenario, py::arg("scenario"),
          py::arg("keep_records") = false, py::arg("threads") = 0,
          "Run all replications of a scenario and aggregate");
    m.def("convergence_sweep", &convergence_sweep, py::arg("theta0"),
          py::arg("cfg"), py::arg("n_list"), py::arg("replications"),
          py::arg("master_seed"), py::arg("threads") = 0,
          "Run the same scenario at increasing latent sizes");
}
