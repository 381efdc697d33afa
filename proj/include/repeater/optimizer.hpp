#pragma once

#include "repeater/keyrate.hpp"
#include "repeater/protocol.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace repeater {

struct DeBounds {
    double lo = 0.0;
    double hi = 1.0;
    bool integer = false; // rounded before each objective evaluation
};

struct DeOptions {
    int population = 0; // 0 -> 15 * dimension
    double crossover = 0.7;
    int max_generations = 200;
    double tol = 1e-8; // relative population spread
    std::uint64_t seed = 1;
    std::vector<double> initial_guess; // optional warm start, replaces one member
};

struct DeResult {
    std::vector<double> best; // integer dims already rounded
    double best_value = 0.0;
    std::vector<double> trace; // best value per generation
    bool converged = false;
    std::int64_t evaluations = 0;
};

/// DE/rand/1/bin minimizer with a per-generation dithered mutation factor in
/// [0.5, 1.0]. Deterministic for a fixed seed; repeated candidates hit an
/// objective cache and return bit-identical values.
DeResult differential_evolution(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<DeBounds>& bounds, const DeOptions& options);

enum class OptimizeMode { Uniform, NonUniform };

struct OptimizationProblem {
    int levels = 1;
    OptimizeMode mode = OptimizeMode::Uniform;
    CutoffStrategy strategy = CutoffStrategy::DifTime;
    EvalConfig eval;
    std::int64_t tau_min = 1;
    std::int64_t tau_max = 0; // 0 -> eval.ttr
    double w_cut_min = 0.0;
    double w_cut_max = 1.0;
    DeOptions de;
    int curve_samples = 33; // uniform mode: rate-vs-threshold samples in the report
};

struct CutoffReport {
    std::vector<double> thresholds; // per level (single entry in uniform mode)
    double rate = 0.0;
    SecretKeyReport key_report;
    double baseline_rate = 0.0; // no cut-off, same hardware and window
    std::vector<double> trace;
    bool converged = false;
    std::vector<std::pair<double, double>> curve; // (threshold, rate)
    bool zero_rate = false; // no threshold produced key
};

/// Secret-key rate of the nested chain with the given per-level thresholds
/// (uniform: one value used at every level). Zero when no key is possible.
double rate_for_thresholds(const OptimizationProblem& problem,
                           const std::vector<double>& thresholds);

/// Maximize the secret-key rate over cut-off thresholds with DE.
CutoffReport optimize_cutoffs(const OptimizationProblem& problem);

/// Deterministic alternative for unimodal rate curves: coarse integer grid
/// over [tau_min, tau_max] followed by a local refinement. Returns (tau, rate).
std::pair<std::int64_t, double> grid_optimize_uniform_tau(const OptimizationProblem& problem,
                                                          std::int64_t coarse_step);

/// Same idea for the fidelity strategy over w_cut.
std::pair<double, double> grid_optimize_w_cut(const OptimizationProblem& problem,
                                              int coarse_points, int refine_points);

struct SweepRow {
    double value = 0.0;
    double tau_target = 0.0;     // optimal threshold at this value
    double rate_target = 0.0;    // rate with the re-optimized threshold
    double rate_baseline = 0.0;  // rate with the baseline threshold
    double ratio = 0.0;          // (rate_target - rate_baseline) / rate_target
    bool ratio_defined = false;
};

/// Re-optimize the uniform threshold for each value of one hardware axis and
/// compare against the threshold that was optimal for the baseline hardware.
std::vector<SweepRow> sensitivity_sweep(const OptimizationProblem& baseline,
                                        const std::string& axis,
                                        const std::vector<double>& values);

} // namespace repeater
