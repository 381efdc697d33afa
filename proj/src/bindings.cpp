#include "repeater/cli.hpp"
#include "repeater/config.hpp"
#include "repeater/convolution.hpp"
#include "repeater/errors.hpp"
#include "repeater/evaluator.hpp"
#include "repeater/fft.hpp"
#include "repeater/keyrate.hpp"
#include "repeater/montecarlo.hpp"
#include "repeater/optimizer.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace repeater;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style>& a) {
    return {a.data(), a.data() + a.size()};
}

py::dict key_report_dict(const SecretKeyReport& r) {
    py::dict out;
    out["t_bar"] = r.t_bar;
    out["w_bar"] = r.w_bar;
    out["f_bar"] = r.f_bar;
    out["secret_key_fraction"] = r.r;
    out["rate"] = r.rate;
    out["covered_mass"] = r.covered_mass;
    return out;
}

py::dict evaluate_config(const std::string& config_json) {
    const ParsedConfig config = parse_config(config_json);
    const EvalResult result = eval_protocol(*config.protocol, config.eval);
    py::dict out;
    out["pmf"] = to_array(result.state.pmf.values);
    out["werner"] = to_array(result.state.werner);
    out["covered_mass"] = result.covered_mass;
    out["low_mass_warning"] = result.low_mass_warning;
    try {
        out["report"] = key_report_dict(secret_key_rate(result.state));
    } catch (const NumericalError&) {
        out["report"] = py::none();
    }
    return out;
}

py::dict sample_histogram(const std::string& config_json, std::int64_t n, std::uint64_t seed) {
    const ParsedConfig config = parse_config(config_json);
    const McEstimate est = estimate_distribution(*config.protocol, config.eval, n, seed);
    py::dict out;
    py::array_t<std::int64_t> counts(static_cast<py::ssize_t>(est.counts.size()));
    std::copy(est.counts.begin(), est.counts.end(), counts.mutable_data());
    out["counts"] = counts;
    out["werner_sum"] = to_array(est.werner_sum);
    out["overflow"] = est.overflow;
    out["n"] = est.n;
    out["seed"] = est.seed;
    return out;
}

py::dict compare_histogram(const std::string& config_json, const py::dict& histogram) {
    const ParsedConfig config = parse_config(config_json);
    const EvalResult result = eval_protocol(*config.protocol, config.eval);
    McEstimate est;
    est.counts = histogram["counts"].cast<std::vector<std::int64_t>>();
    est.werner_sum = histogram["werner_sum"].cast<std::vector<double>>();
    est.overflow = histogram["overflow"].cast<std::int64_t>();
    est.n = histogram["n"].cast<std::int64_t>();
    est.seed = histogram["seed"].cast<std::uint64_t>();
    const ComparisonReport report = compare_to_exact(est, result.state);
    py::dict out;
    out["pass"] = report.pass;
    out["max_cdf_gap"] = report.max_cdf_gap;
    out["werner_within_3sigma_fraction"] = report.werner_within_3sigma_fraction;
    py::list deciles;
    for (const DecileCheck& c : report.deciles) {
        py::dict d;
        d["t"] = c.t;
        d["exact_cdf"] = c.exact_cdf;
        d["empirical_cdf"] = c.empirical_cdf;
        d["z"] = c.z;
        deciles.append(d);
    }
    out["deciles"] = deciles;
    return out;
}

py::dict optimize_config(const std::string& config_json, const std::string& mode,
                         const std::string& strategy, std::uint64_t seed) {
    const ParsedConfig config = parse_config(config_json);
    OptimizationProblem problem;
    const std::int64_t leaves = config.protocol->count_leaves();
    int levels = 0;
    while ((std::int64_t{1} << levels) < leaves) {
        ++levels;
    }
    if ((std::int64_t{1} << levels) != leaves) {
        throw ConfigError("optimize expects a balanced nested swap chain");
    }
    problem.levels = levels;
    problem.mode = mode == "nonuniform" ? OptimizeMode::NonUniform : OptimizeMode::Uniform;
    problem.strategy = cutoff_strategy_from_string(strategy);
    problem.eval = config.eval;
    problem.de.seed = seed;
    const CutoffReport report = optimize_cutoffs(problem);
    py::dict out;
    out["thresholds"] = report.thresholds;
    out["rate"] = report.rate;
    out["baseline_rate"] = report.baseline_rate;
    out["converged"] = report.converged;
    out["zero_rate"] = report.zero_rate;
    out["report"] = key_report_dict(report.key_report);
    py::list curve;
    for (const auto& [threshold, rate] : report.curve) {
        curve.append(py::make_tuple(threshold, rate));
    }
    out["curve"] = curve;
    return out;
}

std::string nested_chain_json(int levels, const std::string& strategy,
                              const std::vector<double>& thresholds) {
    std::vector<CutoffSpec> cutoffs;
    for (double v : thresholds) {
        const CutoffStrategy s = cutoff_strategy_from_string(strategy);
        if (s == CutoffStrategy::Fidelity) {
            cutoffs.push_back(CutoffSpec::fidelity(v));
        } else {
            CutoffSpec spec;
            spec.strategy = s;
            spec.tau = std::llround(v);
            cutoffs.push_back(spec);
        }
    }
    ParsedConfig config;
    config.protocol = build_nested_chain(levels, cutoffs);
    return serialize_config(config);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Waiting-time and fidelity engine for entanglement distribution protocol "
              "trees with cut-offs";
    m.attr("__version__") = cli::kToolVersion;

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const NumericalError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def("evaluate", &evaluate_config, py::arg("config_json"),
          "Evaluate a JSON config: delivery-time pmf, Werner curve and key report.");
    m.def("sample", &sample_histogram, py::arg("config_json"), py::arg("n"), py::arg("seed"),
          "Monte Carlo histogram of (time, Werner) samples.");
    m.def("compare", &compare_histogram, py::arg("config_json"), py::arg("histogram"),
          "Statistical agreement between a sampled histogram and the exact result.");
    m.def("optimize", &optimize_config, py::arg("config_json"), py::arg("mode") = "uniform",
          py::arg("strategy") = "dif_time", py::arg("seed") = 1,
          "Search cut-off thresholds maximizing the secret-key rate.");
    m.def("nested_chain_config", &nested_chain_json, py::arg("levels"),
          py::arg("strategy") = "dif_time", py::arg("thresholds") = std::vector<double>{},
          "Serialized config skeleton for a balanced nested swap chain "
          "(hardware/eval fields still need values).");
    m.def("validate_config", [](const std::string& text) { parse_config(text); },
          py::arg("config_json"), "Raise ValueError when the config is invalid.");

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def("secret_key_fraction", &secret_key_fraction, py::arg("w"));

    m.def("convolve_linear",
          [](const py::array_t<double, py::array::c_style>& a,
             const py::array_t<double, py::array::c_style>& b) {
              return to_array(convolve_linear(from_array(a), from_array(b)));
          },
          py::arg("a"), py::arg("b"),
          "Linear convolution truncated to the window of the inputs.");
    m.def("convolve_circular",
          [](const py::array_t<double, py::array::c_style>& a,
             const py::array_t<double, py::array::c_style>& b) {
              const auto va = from_array(a);
              const auto vb = from_array(b);
              return to_array(convolve_circular(va, vb, va.size()));
          },
          py::arg("a"), py::arg("b"));
}
