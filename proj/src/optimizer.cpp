#include "repeater/optimizer.hpp"

#include "repeater/errors.hpp"
#include "repeater/parallel.hpp"
#include "repeater/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace repeater {

namespace {

std::vector<double> rounded_for_eval(const std::vector<double>& x,
                                     const std::vector<DeBounds>& bounds) {
    std::vector<double> out = x;
    for (std::size_t d = 0; d < bounds.size(); ++d) {
        if (bounds[d].integer) {
            out[d] = std::llround(out[d]);
        }
    }
    return out;
}

std::string cache_key(const std::vector<double>& x) {
    std::string key(x.size() * sizeof(double), '\0');
    std::memcpy(key.data(), x.data(), key.size());
    return key;
}

} // namespace

DeResult differential_evolution(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<DeBounds>& bounds, const DeOptions& options) {
    const std::size_t dim = bounds.size();
    if (dim == 0) {
        throw ConfigError("differential_evolution: empty search space");
    }
    for (const DeBounds& b : bounds) {
        if (!(b.lo <= b.hi)) {
            throw ConfigError("differential_evolution: invalid bounds");
        }
    }
    const int np = options.population > 0 ? options.population
                                          : std::max(8, 15 * static_cast<int>(dim));
    Xoshiro256 rng(options.seed);

    std::unordered_map<std::string, double> cache;
    std::mutex cache_mutex;
    std::int64_t evaluations = 0;
    auto eval = [&](const std::vector<double>& x) {
        const std::vector<double> rounded = rounded_for_eval(x, bounds);
        const std::string key = cache_key(rounded);
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            if (auto it = cache.find(key); it != cache.end()) {
                return it->second;
            }
        }
        const double f = objective(rounded);
        std::lock_guard<std::mutex> lock(cache_mutex);
        cache.emplace(key, f);
        ++evaluations;
        return f;
    };
    // Candidates are generated sequentially (fixed RNG order), evaluated as a
    // parallel batch, then selected by index, so the result does not depend
    // on the worker count.
    auto eval_batch = [&](const std::vector<std::vector<double>>& xs,
                          std::vector<double>& out) {
        out.resize(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) { out[i] = eval(xs[i]); });
    };

    std::vector<std::vector<double>> pop(static_cast<std::size_t>(np),
                                         std::vector<double>(dim));
    std::vector<double> fitness(static_cast<std::size_t>(np));
    for (auto& member : pop) {
        for (std::size_t d = 0; d < dim; ++d) {
            member[d] = bounds[d].lo + rng.next_unit() * (bounds[d].hi - bounds[d].lo);
        }
    }
    if (options.initial_guess.size() == dim) {
        pop[0] = options.initial_guess;
        for (std::size_t d = 0; d < dim; ++d) {
            pop[0][d] = std::clamp(pop[0][d], bounds[d].lo, bounds[d].hi);
        }
    }
    eval_batch(pop, fitness);

    DeResult result;
    auto record_best = [&]() {
        const std::size_t best =
            std::min_element(fitness.begin(), fitness.end()) - fitness.begin();
        result.best = rounded_for_eval(pop[best], bounds);
        result.best_value = fitness[best];
        result.trace.push_back(fitness[best]);
    };
    record_best();

    std::vector<std::vector<double>> trials(pop.size(), std::vector<double>(dim));
    std::vector<double> trial_fitness;
    for (int gen = 0; gen < options.max_generations; ++gen) {
        const double f_weight = 0.5 + 0.5 * rng.next_unit(); // dithered per generation
        for (std::size_t i = 0; i < pop.size(); ++i) {
            std::size_t r1, r2, r3;
            do {
                r1 = rng.next_u64() % pop.size();
            } while (r1 == i);
            do {
                r2 = rng.next_u64() % pop.size();
            } while (r2 == i || r2 == r1);
            do {
                r3 = rng.next_u64() % pop.size();
            } while (r3 == i || r3 == r1 || r3 == r2);

            const std::size_t j_rand = rng.next_u64() % dim;
            std::vector<double>& trial = trials[i];
            for (std::size_t d = 0; d < dim; ++d) {
                if (d == j_rand || rng.next_unit() <= options.crossover) {
                    trial[d] = pop[r1][d] + f_weight * (pop[r2][d] - pop[r3][d]);
                    trial[d] = std::clamp(trial[d], bounds[d].lo, bounds[d].hi);
                } else {
                    trial[d] = pop[i][d];
                }
            }
        }
        eval_batch(trials, trial_fitness);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (trial_fitness[i] <= fitness[i]) {
                pop[i] = trials[i];
                fitness[i] = trial_fitness[i];
            }
        }
        record_best();

        const auto [f_min, f_max] = std::minmax_element(fitness.begin(), fitness.end());
        const double spread = *f_max - *f_min;
        if (spread <= options.tol * std::max(1.0, std::abs(*f_min))) {
            result.converged = true;
            break;
        }
    }
    result.evaluations = evaluations;
    return result;
}

namespace {

std::vector<CutoffSpec> thresholds_to_cutoffs(const OptimizationProblem& problem,
                                              const std::vector<double>& thresholds) {
    std::vector<CutoffSpec> cutoffs;
    const std::size_t want =
        problem.mode == OptimizeMode::Uniform ? 1 : static_cast<std::size_t>(problem.levels);
    if (thresholds.size() != want) {
        throw ConfigError("wrong number of thresholds for the optimization mode");
    }
    for (double v : thresholds) {
        if (problem.strategy == CutoffStrategy::Fidelity) {
            cutoffs.push_back(CutoffSpec::fidelity(v));
        } else {
            CutoffSpec spec;
            spec.strategy = problem.strategy;
            spec.tau = std::llround(v);
            cutoffs.push_back(spec);
        }
    }
    return cutoffs;
}

void check_problem(const OptimizationProblem& problem) {
    if (problem.levels < 1) {
        throw ConfigError("cut-off optimization needs at least one nesting level");
    }
    if (problem.strategy == CutoffStrategy::Fidelity &&
        problem.eval.backend == Backend::Fast) {
        throw ConfigError("the fidelity cut-off is not supported by the fast backend; "
                          "use direct or fourier");
    }
}

} // namespace

double rate_for_thresholds(const OptimizationProblem& problem,
                           const std::vector<double>& thresholds) {
    const auto cutoffs = thresholds_to_cutoffs(problem, thresholds);
    const auto chain = build_nested_chain(problem.levels, cutoffs);
    try {
        const EvalResult result = eval_protocol(*chain, problem.eval);
        return secret_key_rate(result.state).rate;
    } catch (const NumericalError&) {
        return 0.0; // no mass in the window or success impossible: no key
    }
}

CutoffReport optimize_cutoffs(const OptimizationProblem& problem) {
    check_problem(problem);
    const std::size_t dim =
        problem.mode == OptimizeMode::Uniform ? 1 : static_cast<std::size_t>(problem.levels);
    const std::int64_t tau_max = problem.tau_max > 0 ? problem.tau_max : problem.eval.ttr;

    std::vector<DeBounds> bounds;
    for (std::size_t d = 0; d < dim; ++d) {
        if (problem.strategy == CutoffStrategy::Fidelity) {
            bounds.push_back({problem.w_cut_min, problem.w_cut_max, false});
        } else {
            bounds.push_back({static_cast<double>(problem.tau_min),
                              static_cast<double>(tau_max), true});
        }
    }

    auto objective = [&](const std::vector<double>& x) { return -rate_for_thresholds(problem, x); };

    // Coarse scan along the uniform diagonal to seed the population: rate
    // landscapes can be near-zero almost everywhere, and a flat random
    // population would stall immediately.
    DeOptions de_options = problem.de;
    if (de_options.initial_guess.empty()) {
        double best_guess = bounds[0].lo;
        double best_rate = -1.0;
        const int scan = 24;
        for (int i = 0; i <= scan; ++i) {
            double v = bounds[0].lo +
                       (bounds[0].hi - bounds[0].lo) * static_cast<double>(i) / scan;
            if (bounds[0].integer) {
                v = std::llround(v);
            }
            const double rate = rate_for_thresholds(problem, std::vector<double>(dim, v));
            if (rate > best_rate) {
                best_rate = rate;
                best_guess = v;
            }
        }
        de_options.initial_guess.assign(dim, best_guess);
    }

    const DeResult de = differential_evolution(objective, bounds, de_options);

    CutoffReport report;
    report.thresholds = de.best;
    report.rate = -de.best_value;
    report.trace = de.trace;
    report.converged = de.converged;
    report.zero_rate = report.rate <= 0.0;

    {
        const auto chain = build_nested_chain(problem.levels, {});
        const EvalResult base = eval_protocol(*chain, problem.eval);
        try {
            report.baseline_rate = secret_key_rate(base.state).rate;
        } catch (const NumericalError&) {
            report.baseline_rate = 0.0;
        }
    }
    {
        const auto cutoffs = thresholds_to_cutoffs(problem, report.thresholds);
        const auto chain = build_nested_chain(problem.levels, cutoffs);
        const EvalResult best = eval_protocol(*chain, problem.eval);
        try {
            report.key_report = secret_key_rate(best.state);
        } catch (const NumericalError&) {
            report.key_report = {};
        }
    }

    if (problem.mode == OptimizeMode::Uniform && problem.curve_samples > 1) {
        const double lo = bounds[0].lo;
        const double hi = bounds[0].hi;
        double last = std::nan("");
        for (int i = 0; i < problem.curve_samples; ++i) {
            double v = lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(problem.curve_samples - 1);
            if (bounds[0].integer) {
                v = std::llround(v);
            }
            if (v == last) {
                continue;
            }
            last = v;
            report.curve.emplace_back(v, rate_for_thresholds(problem, {v}));
        }
    }
    return report;
}

std::pair<std::int64_t, double> grid_optimize_uniform_tau(const OptimizationProblem& problem,
                                                          std::int64_t coarse_step) {
    check_problem(problem);
    const std::int64_t tau_max = problem.tau_max > 0 ? problem.tau_max : problem.eval.ttr;
    const std::int64_t step = std::max<std::int64_t>(1, coarse_step);

    std::int64_t best_tau = problem.tau_min;
    double best_rate = -1.0;
    auto consider = [&](std::int64_t tau) {
        const double rate = rate_for_thresholds(problem, {static_cast<double>(tau)});
        if (rate > best_rate) {
            best_rate = rate;
            best_tau = tau;
        }
    };
    for (std::int64_t tau = problem.tau_min; tau <= tau_max; tau += step) {
        consider(tau);
    }
    consider(tau_max);
    if (step > 1) {
        const std::int64_t lo = std::max(problem.tau_min, best_tau - step);
        const std::int64_t hi = std::min(tau_max, best_tau + step);
        for (std::int64_t tau = lo; tau <= hi; ++tau) {
            consider(tau);
        }
    }
    return {best_tau, best_rate};
}

std::pair<double, double> grid_optimize_w_cut(const OptimizationProblem& problem,
                                              int coarse_points, int refine_points) {
    check_problem(problem);
    double best_w = problem.w_cut_min;
    double best_rate = -1.0;
    auto consider = [&](double w) {
        const double rate = rate_for_thresholds(problem, {w});
        if (rate > best_rate) {
            best_rate = rate;
            best_w = w;
        }
    };
    const double lo = problem.w_cut_min;
    const double hi = problem.w_cut_max;
    const int n = std::max(2, coarse_points);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        consider(lo + step * i);
    }
    const double rlo = std::max(lo, best_w - step);
    const double rhi = std::min(hi, best_w + step);
    const int m = std::max(2, refine_points);
    for (int i = 0; i < m; ++i) {
        consider(rlo + (rhi - rlo) * static_cast<double>(i) / static_cast<double>(m - 1));
    }
    return {best_w, best_rate};
}

std::vector<SweepRow> sensitivity_sweep(const OptimizationProblem& baseline,
                                        const std::string& axis,
                                        const std::vector<double>& values) {
    check_problem(baseline);
    if (axis != "p_gen" && axis != "p_swap" && axis != "w0" && axis != "t_coh") {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    auto with_value = [&](double v) {
        OptimizationProblem p = baseline;
        if (axis == "p_gen") p.eval.hardware.p_gen = v;
        else if (axis == "p_swap") p.eval.hardware.p_swap = v;
        else if (axis == "w0") p.eval.hardware.w0 = v;
        else p.eval.hardware.t_coh = v;
        return p;
    };

    const CutoffReport base_report = optimize_cutoffs(baseline);
    const std::vector<double>& tau_baseline = base_report.thresholds;

    std::vector<SweepRow> rows;
    for (double v : values) {
        const OptimizationProblem p = with_value(v);
        const CutoffReport opt = optimize_cutoffs(p);
        SweepRow row;
        row.value = v;
        row.tau_target = opt.thresholds.front();
        row.rate_target = opt.rate;
        row.rate_baseline = rate_for_thresholds(p, tau_baseline);
        if (opt.rate > 0.0) {
            row.ratio = (row.rate_target - row.rate_baseline) / row.rate_target;
            row.ratio_defined = true;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace repeater
