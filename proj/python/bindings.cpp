#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "chainrisk/analytic.hpp"
#include "chainrisk/commands.hpp"
#include "chainrisk/config.hpp"
#include "chainrisk/dists.hpp"
#include "chainrisk/econ.hpp"
#include "chainrisk/error.hpp"
#include "chainrisk/model.hpp"
#include "chainrisk/montecarlo.hpp"

namespace py = pybind11;
using namespace chainrisk;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Blockchain functional-time analysis: analytic and Monte Carlo engines";

    auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(mod, "DomainError", base.ptr());
    py::register_exception<UnsupportedFamilyError>(mod, "UnsupportedFamilyError", base.ptr());
    py::register_exception<NumericalError>(mod, "NumericalError", base.ptr());
    py::register_exception<ConvergenceError>(mod, "ConvergenceError", base.ptr());
    py::register_exception<ConditioningError>(mod, "ConditioningError", base.ptr());
    py::register_exception<RunawayError>(mod, "RunawayError", base.ptr());
    py::register_exception<ParseError>(mod, "ParseError", base.ptr());

    py::class_<Distribution>(mod, "Distribution")
        .def_static("exponential", &Distribution::exponential, py::arg("rate"))
        .def_static("gamma", &Distribution::gamma, py::arg("shape"), py::arg("rate"))
        .def_static("weibull", &Distribution::weibull, py::arg("scale"), py::arg("shape"))
        .def("pdf", &Distribution::pdf)
        .def("cdf", &Distribution::cdf)
        .def("sf", &Distribution::sf)
        .def("mean", &Distribution::mean)
        .def("quantile", &Distribution::quantile)
        .def("__repr__", &Distribution::describe)
        .def(py::self == py::self);

    py::enum_<AttackMode>(mod, "AttackMode")
        .value("destructive", AttackMode::Destructive)
        .value("ransom", AttackMode::Ransom);

    py::class_<BlockchainSpec>(mod, "BlockchainSpec")
        .def_static("from_nodes", &BlockchainSpec::from_nodes, py::arg("n"), py::arg("mode"), py::arg("hackers"),
                    py::arg("detect"), py::arg("reset"))
        .def_static("from_quorum", &BlockchainSpec::from_quorum, py::arg("m"), py::arg("hackers"),
                    py::arg("detect"), py::arg("reset"))
        .def_property_readonly("m", &BlockchainSpec::m)
        .def_property_readonly("k", &BlockchainSpec::k)
        .def("with_quorum", &BlockchainSpec::with_quorum)
        .def("with_hacker_count", &BlockchainSpec::with_hacker_count);

    mod.def("quorum_m", &quorum_m, py::arg("n"), py::arg("mode"));
    mod.def("gamma_sum_cdf",
            [](double shape1, double rate1, double shape2, double rate2, double t) {
                return gamma_sum_cdf(GammaSumSeriesParams{shape1, rate1, shape2, rate2}, t);
            },
            py::arg("shape1"), py::arg("rate1"), py::arg("shape2"), py::arg("rate2"), py::arg("t"));
    mod.def("z_m_cdf", &z_m_cdf);
    mod.def("hack_detect_prob", [](const BlockchainSpec& s) { return hack_detect_prob(s); });
    mod.def("mean_functional_time", [](const BlockchainSpec& s) { return mean_functional_time(s); });
    mod.def("conditional_hack_mean", [](const BlockchainSpec& s) { return conditional_hack_mean(s); });
    mod.def("conditional_detect_mean", [](const BlockchainSpec& s) { return conditional_detect_mean(s); });
    mod.def(
        "instantaneous_prob",
        [](const BlockchainSpec& s, const std::vector<double>& t) { return instantaneous_prob(s, t); },
        py::arg("spec"), py::arg("t"));

    py::class_<EstimateWithError>(mod, "Estimate")
        .def_readonly("mean", &EstimateWithError::mean)
        .def_readonly("std_error", &EstimateWithError::std_error)
        .def_readonly("n", &EstimateWithError::n)
        .def_readonly("seed", &EstimateWithError::seed);

    auto mc_opts = [](unsigned threads) {
        McOptions o;
        o.threads = threads;
        return o;
    };
    mod.def(
        "estimate_mean_functional_time",
        [mc_opts](const BlockchainSpec& s, std::size_t n, std::uint64_t seed, unsigned threads) {
            py::gil_scoped_release release;
            return estimate_mean_functional_time(s, n, seed, mc_opts(threads));
        },
        py::arg("spec"), py::arg("n_reps") = 30000, py::arg("seed") = 0, py::arg("threads") = 1);
    mod.def(
        "estimate_cycle_hack_prob",
        [mc_opts](const BlockchainSpec& s, std::size_t n, std::uint64_t seed, unsigned threads) {
            py::gil_scoped_release release;
            return estimate_cycle_hack_prob(s, n, seed, mc_opts(threads));
        },
        py::arg("spec"), py::arg("n_reps") = 30000, py::arg("seed") = 0, py::arg("threads") = 1);
    mod.def(
        "estimate_survival_curve",
        [mc_opts](const BlockchainSpec& s, const std::vector<double>& t, std::size_t n, std::uint64_t seed,
                  unsigned threads) {
            py::gil_scoped_release release;
            return estimate_survival_curve(s, t, n, seed, mc_opts(threads));
        },
        py::arg("spec"), py::arg("t"), py::arg("n_reps") = 30000, py::arg("seed") = 0, py::arg("threads") = 1);

    py::class_<RateExpr>(mod, "RateExpr")
        .def(py::init([](double a, double b, double c) { return RateExpr{a, b, c}; }), py::arg("a"),
             py::arg("b") = 1.0, py::arg("c") = 0.0)
        .def("__call__", &RateExpr::operator());
    py::class_<EconSpec>(mod, "EconSpec")
        .def(py::init([](RateExpr r, RateExpr c1, RateExpr c2) { return EconSpec{r, c1, c2}; }),
             py::arg("revenue"), py::arg("reset_cost"), py::arg("run_cost"));
    mod.def("expected_net_revenue_rate",
            [](const BlockchainSpec& s, const EconSpec& e) { return expected_net_revenue_rate(s, e); });
    mod.def(
        "optimize_m",
        [](const BlockchainSpec& s, const EconSpec& e, int lo, int hi) {
            const auto r = optimize_m(s, e, lo, hi, AnalyticEngine{});
            std::vector<std::pair<int, double>> curve;
            for (const auto& p : r.curve) curve.emplace_back(p.m, p.value);
            return py::make_tuple(r.best_m, r.best_value, curve);
        },
        py::arg("spec"), py::arg("econ"), py::arg("m_lo"), py::arg("m_hi"));

    mod.def(
        "run_command",
        [](const std::string& command, const std::string& config_text, const std::string& engine) {
            const auto choice = parse_engine_choice(engine);
            if (!choice) throw ParseError("engine must be mc, analytic or both", 0);
            const RunConfig cfg = parse_config(config_text);
            CommandResult r;
            {
                py::gil_scoped_release release;
                r = run_command(command, cfg, *choice);
            }
            return py::make_tuple(r.table.str(), r.passed);
        },
        py::arg("command"), py::arg("config_text"), py::arg("engine") = "both",
        "Runs a CLI command on a config document; returns (csv_body, passed).");
}
