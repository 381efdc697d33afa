#pragma once

#include "repeater/evaluator.hpp"
#include "repeater/protocol.hpp"
#include "repeater/rng.hpp"

#include <cstdint>
#include <vector>

namespace repeater {

/// One sampled delivery: waiting time and Werner parameter.
struct McSample {
    std::int64_t t = 0;
    double w = 0.0;
};

/// Histogram of samples over t = 1..ttr plus an overflow bin for deliveries
/// beyond the truncation window.
struct McEstimate {
    std::vector<std::int64_t> counts; // size ttr + 1, index 0 unused
    std::vector<double> werner_sum;   // same layout
    std::int64_t overflow = 0;
    std::int64_t n = 0;
    std::uint64_t seed = 0;

    std::int64_t ttr() const { return static_cast<std::int64_t>(counts.size()) - 1; }
    std::vector<double> empirical_pmf() const;
};

/// Recursive sampler of the protocol tree: one run yields one (t, w) tuple.
/// The per-sample step budget guards against pathological configurations
/// where success is (nearly) impossible.
McSample sample_protocol(const ProtocolNode& root, const EvalConfig& cfg, Xoshiro256& rng,
                         std::int64_t step_cap = 1000000000);

/// Aggregate n samples into a histogram. Deterministic for a fixed seed:
/// samples are drawn in fixed-size chunks with per-chunk substreams and
/// merged in chunk order, so the worker count never changes the result.
McEstimate estimate_distribution(const ProtocolNode& root, const EvalConfig& cfg,
                                 std::int64_t n, std::uint64_t seed);

struct DecileCheck {
    std::int64_t t = 0;
    double exact_cdf = 0.0;
    double empirical_cdf = 0.0;
    double z = 0.0;
};

struct ComparisonReport {
    std::vector<DecileCheck> deciles;
    double max_cdf_gap = 0.0;
    double werner_within_3sigma_fraction = 0.0; // over bins with enough samples
    std::int64_t werner_bins_checked = 0;
    bool pass = false; // all decile z-scores within +-4
};

/// Statistical agreement between a sampled estimate and an exactly computed
/// link state on the same window.
ComparisonReport compare_to_exact(const McEstimate& estimate, const LinkState& exact);

} // namespace repeater
