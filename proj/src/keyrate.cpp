#include "repeater/keyrate.hpp"

#include "repeater/errors.hpp"

#include <cmath>

namespace repeater {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("binary_entropy: probability outside [0, 1]");
    }
    if (p == 0.0 || p == 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double secret_key_fraction(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw ConfigError("secret_key_fraction: Werner parameter outside [0, 1]");
    }
    const double e = 0.5 * (1.0 - w);
    return std::max(0.0, 1.0 - 2.0 * binary_entropy(e));
}

std::pair<double, double> truncated_averages(const LinkState& ls) {
    const double p_tr = ls.pmf.mass();
    if (p_tr <= 0.0) {
        throw NumericalError("no probability mass inside the truncation window, "
                             "cannot compute averages");
    }
    const double ttr = static_cast<double>(ls.pmf.ttr());
    double t_sum = 0.0;
    double w_sum = 0.0;
    for (std::size_t t = 1; t < ls.pmf.values.size(); ++t) {
        t_sum += static_cast<double>(t) * ls.pmf[t];
        w_sum += ls.werner[t] * ls.pmf[t];
    }
    const double t_bar = ttr * (1.0 - p_tr) / p_tr + t_sum / p_tr;
    const double w_bar = w_sum / p_tr;
    return {t_bar, w_bar};
}

SecretKeyReport secret_key_rate(const LinkState& ls, bool pointwise) {
    SecretKeyReport report;
    const auto [t_bar, w_bar] = truncated_averages(ls);
    report.t_bar = t_bar;
    report.w_bar = w_bar;
    report.f_bar = (1.0 + 3.0 * w_bar) / 4.0;
    report.covered_mass = ls.pmf.mass();
    if (pointwise) {
        double r_sum = 0.0;
        for (std::size_t t = 1; t < ls.pmf.values.size(); ++t) {
            if (ls.pmf[t] > 0.0) {
                r_sum += secret_key_fraction(ls.werner[t]) * ls.pmf[t];
            }
        }
        report.r = r_sum / report.covered_mass;
    } else {
        report.r = secret_key_fraction(w_bar);
    }
    report.rate = report.r / report.t_bar;
    return report;
}

std::int64_t suggest_truncation_time(const ProtocolNode& root, EvalConfig cfg,
                                     std::int64_t first, double target_mass,
                                     std::int64_t max_ttr) {
    std::int64_t ttr = std::max<std::int64_t>(1, first);
    while (true) {
        cfg.ttr = ttr;
        const EvalResult result = eval_protocol(root, cfg);
        if (result.covered_mass >= target_mass || ttr >= max_ttr) {
            return ttr;
        }
        ttr *= 2;
    }
}

} // namespace repeater
