#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repeater {

/// Probability mass over discrete delivery times t = 0..ttr. Mass beyond the
/// truncation time is dropped, never renormalized, so the total may be < 1.
/// A PMF describing a delivered link always has values[0] == 0: every attempt
/// consumes at least one time step.
struct TruncatedPmf {
    std::vector<double> values; // size ttr + 1

    TruncatedPmf() = default;
    explicit TruncatedPmf(std::vector<double> v) : values(std::move(v)) {}
    explicit TruncatedPmf(std::int64_t ttr) : values(static_cast<std::size_t>(ttr) + 1, 0.0) {}

    std::int64_t ttr() const { return static_cast<std::int64_t>(values.size()) - 1; }

    double mass() const {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }

    /// Pr(T <= t) for each t; same length as values.
    std::vector<double> cdf() const {
        std::vector<double> out(values.size());
        double s = 0.0;
        for (std::size_t t = 0; t < values.size(); ++t) {
            s += values[t];
            out[t] = s;
        }
        return out;
    }

    double& operator[](std::size_t t) { return values[t]; }
    double operator[](std::size_t t) const { return values[t]; }
};

/// Check the PMF invariants: entries in [0, 1], total mass <= 1 + 1e-12,
/// no mass at t = 0. Returns an empty string when everything holds, else a
/// description of the first violation.
std::string check_pmf_invariants(const TruncatedPmf& pmf);

} // namespace repeater
