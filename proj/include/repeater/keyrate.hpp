#pragma once

#include "repeater/evaluator.hpp"

namespace repeater {

/// BB84 secret-key figures derived from a link state under the
/// truncation-restart protocol: if no link is delivered within the window the
/// protocol restarts, so failed windows cost ttr time steps each.
struct SecretKeyReport {
    double t_bar = 0.0;        // average total waiting time (time steps)
    double w_bar = 0.0;        // average Werner parameter of delivered links
    double f_bar = 0.0;        // fidelity (1 + 3*w_bar) / 4
    double r = 0.0;            // secret-key fraction in [0, 1]
    double rate = 0.0;         // r / t_bar
    double covered_mass = 0.0; // Pr(T <= ttr)
};

/// h(p) = -p log2 p - (1-p) log2(1-p), with h(0) = h(1) = 0.
double binary_entropy(double p);

/// r(w) = max(0, 1 - 2 h((1-w)/2)); the X and Z error rates coincide for
/// Werner states.
double secret_key_fraction(double w);

/// (t_bar, w_bar) under the truncation-restart protocol.
std::pair<double, double> truncated_averages(const LinkState& ls);

/// Full report. pointwise=true evaluates the key fraction at each delivery
/// time and averages, instead of evaluating it once at w_bar.
SecretKeyReport secret_key_rate(const LinkState& ls, bool pointwise = false);

/// Smallest window of the form first*2^k whose covered mass reaches
/// target_mass (caps at max_ttr and returns the last tried window).
std::int64_t suggest_truncation_time(const ProtocolNode& root, EvalConfig cfg,
                                     std::int64_t first = 1024,
                                     double target_mass = 0.99,
                                     std::int64_t max_ttr = 1 << 24);

} // namespace repeater
