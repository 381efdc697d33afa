#include "repeater/cli.hpp"

#include "repeater/config.hpp"
#include "repeater/errors.hpp"
#include "repeater/keyrate.hpp"
#include "repeater/montecarlo.hpp"
#include "repeater/optimizer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace repeater::cli {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write file '" + path + "'");
    }
    out << content;
}

json manifest_json(const std::string& command, const ParsedConfig& config,
                   std::uint64_t seed, bool has_seed, double duration_s,
                   double covered_mass) {
    json m;
    m["command"] = command;
    m["config_hash"] = config_hash(config);
    if (has_seed) {
        m["seed"] = seed;
    }
    m["backend"] = to_string(config.eval.backend);
    m["ttr"] = config.eval.ttr;
    m["duration_seconds"] = duration_s;
    m["covered_mass"] = covered_mass;
    m["version"] = kToolVersion;
    return m;
}

json report_json(const SecretKeyReport& r) {
    json out;
    out["t_bar"] = r.t_bar;
    out["w_bar"] = r.w_bar;
    out["f_bar"] = r.f_bar;
    out["secret_key_fraction"] = r.r;
    out["rate"] = r.rate;
    out["covered_mass"] = r.covered_mass;
    return out;
}

std::string format_17g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonEvalFlags {
    std::string config_path;
    std::int64_t ttr_override = 0;
    std::string backend_override;
    int padding_override = 0;

    ParsedConfig load() const {
        ParsedConfig config = parse_config(read_file(config_path));
        if (ttr_override > 0) {
            config.eval.ttr = ttr_override;
        }
        if (!backend_override.empty()) {
            config.eval.backend = backend_from_string(backend_override);
        }
        if (padding_override > 0) {
            config.eval.padding_factor = padding_override;
        }
        if (const std::string err = config.eval.validate(); !err.empty()) {
            throw ConfigError(err);
        }
        return config;
    }
};

int cmd_evaluate(const CommonEvalFlags& flags, const std::string& out_path,
                 const std::string& format) {
    const auto start = std::chrono::steady_clock::now();
    const ParsedConfig config = flags.load();
    const EvalResult result = eval_protocol(*config.protocol, config.eval);
    SecretKeyReport report;
    bool have_report = true;
    try {
        report = secret_key_rate(result.state);
    } catch (const NumericalError&) {
        have_report = false; // zero covered mass: distribution is still written
    }
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json manifest =
        manifest_json("evaluate", config, 0, false, duration, result.covered_mass);

    if (result.low_mass_warning) {
        std::cerr << "warning: only " << result.covered_mass
                  << " of the probability mass lies inside the truncation window\n";
    }

    if (format == "csv") {
        write_distribution_csv(out_path, result.state);
        json meta;
        meta["manifest"] = manifest;
        if (have_report) {
            meta["report"] = report_json(report);
        }
        write_file(out_path + ".meta.json", meta.dump(2) + "\n");
    } else {
        json doc;
        doc["manifest"] = manifest;
        if (have_report) {
            doc["report"] = report_json(report);
        }
        json dist;
        dist["pmf"] = result.state.pmf.values;
        dist["werner"] = result.state.werner;
        doc["distribution"] = dist;
        write_file(out_path, doc.dump() + "\n");
    }
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

// The optimizer works on nested swap chains; recover the nesting level from
// the protocol shape.
int chain_levels(const ProtocolNode& root) {
    const std::int64_t leaves = root.count_leaves();
    int levels = 0;
    while ((std::int64_t{1} << levels) < leaves) {
        ++levels;
    }
    if ((std::int64_t{1} << levels) != leaves) {
        throw ConfigError("optimize expects a balanced nested swap chain");
    }
    return levels;
}

CutoffStrategy first_cutoff_strategy(const ProtocolNode& node, CutoffStrategy fallback) {
    if (node.cutoff) {
        return node.cutoff->strategy;
    }
    if (node.left) {
        return first_cutoff_strategy(*node.left, fallback);
    }
    return fallback;
}

int cmd_optimize(const CommonEvalFlags& flags, const std::string& out_path,
                 const std::string& mode, std::uint64_t seed, bool has_seed,
                 const std::string& strategy_flag) {
    const auto start = std::chrono::steady_clock::now();
    const ParsedConfig config = flags.load();

    OptimizationProblem problem;
    problem.levels = chain_levels(*config.protocol);
    problem.mode = mode == "nonuniform" ? OptimizeMode::NonUniform : OptimizeMode::Uniform;
    problem.strategy = strategy_flag.empty()
                           ? first_cutoff_strategy(*config.protocol, CutoffStrategy::DifTime)
                           : cutoff_strategy_from_string(strategy_flag);
    problem.eval = config.eval;
    if (!has_seed) {
        seed = std::random_device{}();
    }
    problem.de.seed = seed;

    const CutoffReport report = optimize_cutoffs(problem);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json doc;
    doc["manifest"] = manifest_json("optimize", config, seed, true, duration,
                                    report.key_report.covered_mass);
    doc["mode"] = mode;
    doc["strategy"] = to_string(problem.strategy);
    doc["levels"] = problem.levels;
    doc["thresholds"] = report.thresholds;
    doc["rate"] = report.rate;
    doc["baseline_rate"] = report.baseline_rate;
    doc["zero_rate"] = report.zero_rate;
    doc["converged"] = report.converged;
    doc["report"] = report_json(report.key_report);
    doc["trace"] = report.trace;
    json curve = json::array();
    for (const auto& [threshold, rate] : report.curve) {
        curve.push_back({{"threshold", threshold}, {"rate", rate}});
    }
    doc["curve"] = curve;
    write_file(out_path, doc.dump(2) + "\n");
    std::cout << doc["manifest"].dump(2) << "\n";
    return 0;
}

int cmd_sample(const CommonEvalFlags& flags, const std::string& out_path, std::int64_t n,
               std::uint64_t seed, bool has_seed) {
    const auto start = std::chrono::steady_clock::now();
    const ParsedConfig config = flags.load();
    if (!has_seed) {
        seed = std::random_device{}();
    }
    const McEstimate estimate = estimate_distribution(*config.protocol, config.eval, n, seed);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double covered =
        1.0 - static_cast<double>(estimate.overflow) / static_cast<double>(estimate.n);

    json doc;
    doc["manifest"] = manifest_json("sample", config, seed, true, duration, covered);
    doc["n"] = estimate.n;
    doc["seed"] = estimate.seed;
    doc["ttr"] = estimate.ttr();
    doc["overflow"] = estimate.overflow;
    doc["counts"] = estimate.counts;
    doc["werner_sum"] = estimate.werner_sum;
    write_file(out_path, doc.dump() + "\n");
    std::cout << doc["manifest"].dump(2) << "\n";
    return 0;
}

McEstimate read_estimate(const std::string& path) {
    const json doc = json::parse(read_file(path));
    McEstimate est;
    est.n = doc.at("n").get<std::int64_t>();
    est.seed = doc.at("seed").get<std::uint64_t>();
    est.overflow = doc.at("overflow").get<std::int64_t>();
    est.counts = doc.at("counts").get<std::vector<std::int64_t>>();
    est.werner_sum = doc.at("werner_sum").get<std::vector<double>>();
    return est;
}

int cmd_compare(const std::string& exact_path, const std::string& samples_path,
                const std::string& out_path) {
    const LinkState exact = read_distribution_file(exact_path);
    const McEstimate estimate = read_estimate(samples_path);
    const ComparisonReport report = compare_to_exact(estimate, exact);

    json doc;
    doc["pass"] = report.pass;
    doc["max_cdf_gap"] = report.max_cdf_gap;
    doc["werner_within_3sigma_fraction"] = report.werner_within_3sigma_fraction;
    doc["werner_bins_checked"] = report.werner_bins_checked;
    json deciles = json::array();
    for (const DecileCheck& c : report.deciles) {
        deciles.push_back({{"t", c.t},
                           {"exact_cdf", c.exact_cdf},
                           {"empirical_cdf", c.empirical_cdf},
                           {"z", c.z}});
    }
    doc["deciles"] = deciles;
    const std::string text = doc.dump(2) + "\n";
    if (!out_path.empty()) {
        write_file(out_path, text);
    }
    std::cout << text;
    return report.pass ? 0 : 1;
}

} // namespace

void write_distribution_csv(const std::string& path, const LinkState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write file '" + path + "'");
    }
    out << "t,pmf,cdf,werner,fidelity\n";
    double cdf = 0.0;
    for (std::size_t t = 0; t < state.pmf.values.size(); ++t) {
        cdf += state.pmf[t];
        const double w = state.werner[t];
        out << t << ',' << format_17g(state.pmf[t]) << ',' << format_17g(cdf) << ','
            << format_17g(w) << ',' << format_17g((1.0 + 3.0 * w) / 4.0) << '\n';
    }
}

LinkState read_distribution_file(const std::string& path) {
    LinkState state;
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        const json doc = json::parse(read_file(path));
        const json& dist = doc.contains("distribution") ? doc.at("distribution") : doc;
        state.pmf = TruncatedPmf(dist.at("pmf").get<std::vector<double>>());
        state.werner = dist.at("werner").get<std::vector<double>>();
        return state;
    }

    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,pmf,cdf,werner,fidelity", 0) != 0) {
        throw ConfigError("'" + path + "' is not a distribution CSV (bad header)");
    }
    std::vector<double> pmf;
    std::vector<double> werner;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        double t = 0.0;
        double p = 0.0;
        double c = 0.0;
        double w = 0.0;
        double f = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &p, &c, &w, &f) != 5) {
            throw ConfigError("'" + path + "' has a malformed CSV row: " + line);
        }
        pmf.push_back(p);
        werner.push_back(w);
    }
    state.pmf = TruncatedPmf(std::move(pmf));
    state.werner = std::move(werner);
    return state;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Waiting-time and fidelity engine for entanglement distribution "
                 "protocol trees with cut-offs"};
    app.require_subcommand(1);

    CommonEvalFlags flags;
    std::string out_path;
    std::string format = "csv";
    std::string mode = "uniform";
    std::string strategy_flag;
    std::string exact_path;
    std::string samples_path;
    std::string compare_out;
    std::int64_t n_samples = 10000;
    std::uint64_t seed = 0;

    auto add_common = [&flags](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "JSON config path")->required();
        cmd->add_option("--ttr", flags.ttr_override, "override the truncation time");
        cmd->add_option("--backend", flags.backend_override, "direct|fourier|fast");
        cmd->add_option("--padding-factor", flags.padding_override,
                        "zero-padding multiple for the Fourier backends");
    };

    CLI::App* evaluate = app.add_subcommand("evaluate", "compute the delivery-time "
                                                        "distribution and key rate");
    add_common(evaluate);
    evaluate->add_option("--out", out_path, "output path")->required();
    evaluate->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* optimize = app.add_subcommand("optimize", "search cut-off thresholds "
                                                        "maximizing the secret-key rate");
    add_common(optimize);
    optimize->add_option("--out", out_path, "report path")->required();
    optimize->add_option("--mode", mode, "uniform|nonuniform")
        ->check(CLI::IsMember({"uniform", "nonuniform"}));
    optimize->add_option("--strategy", strategy_flag, "dif_time|max_time|fidelity");
    CLI::Option* opt_seed = optimize->add_option("--seed", seed, "optimizer seed");

    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo sampling of the protocol");
    add_common(sample);
    sample->add_option("--out", out_path, "output path")->required();
    sample->add_option("-n,--samples", n_samples, "number of samples");
    CLI::Option* smp_seed = sample->add_option("--seed", seed, "sampler seed");

    CLI::App* compare = app.add_subcommand("compare", "statistical check of samples "
                                                      "against an exact distribution");
    compare->add_option("--exact", exact_path, "distribution file from 'evaluate'")->required();
    compare->add_option("--samples", samples_path, "estimate file from 'sample'")->required();
    compare->add_option("--out", compare_out, "also write the report here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (evaluate->parsed()) {
            return cmd_evaluate(flags, out_path, format);
        }
        if (optimize->parsed()) {
            return cmd_optimize(flags, out_path, mode, seed, !opt_seed->empty(), strategy_flag);
        }
        if (sample->parsed()) {
            return cmd_sample(flags, out_path, n_samples, seed, !smp_seed->empty());
        }
        if (compare->parsed()) {
            return cmd_compare(exact_path, samples_path, compare_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

} // namespace repeater::cli
