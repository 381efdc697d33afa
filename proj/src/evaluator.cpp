#include "repeater/evaluator.hpp"

#include "repeater/errors.hpp"
#include "repeater/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>

namespace repeater {

namespace {

constexpr double kSeriesTailCutoff = 1e-15; // residual failure-chain mass worth keeping
constexpr double kSingularityTol = 1e-14;   // |1 - F[pf]| below this is a lost cause
constexpr double kNegativeClampTol = 1e-12; // inverse-transform cancellation noise

double sum(const RealSequence& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

RealSequence decay_table(double t_coh, std::size_t n) {
    RealSequence table(n, 1.0);
    if (std::isinf(t_coh)) {
        return table;
    }
    for (std::size_t d = 1; d < n; ++d) {
        table[d] = std::exp(-static_cast<double>(d) / t_coh);
    }
    return table;
}

double decay_step(double t_coh) {
    return std::isinf(t_coh) ? 1.0 : std::exp(-1.0 / t_coh);
}

void check_window(const LinkState& a, const LinkState& b) {
    if (a.pmf.values.size() != b.pmf.values.size()) {
        throw NumericalError("input links have different truncation windows");
    }
}

// Column-wise acceptance bounds of the pair loop for one strategy. Region 1
// iterates tb in [lo, ta] (the attempt finishes at ta), region 2 iterates
// tb in (ta, hi] (it finishes at tb).
struct PairWindow {
    std::int64_t lo;
    std::int64_t hi;
};

PairWindow accept_window(const CutoffSpec* spec, std::int64_t ta, std::int64_t ttr) {
    if (!spec) {
        return {1, ttr};
    }
    switch (spec->strategy) {
    case CutoffStrategy::DifTime:
        return {std::max<std::int64_t>(1, ta - spec->tau), std::min(ttr, ta + spec->tau)};
    case CutoffStrategy::MaxTime:
        return {1, std::min(ttr, spec->tau)};
    case CutoffStrategy::Fidelity:
        return {1, ttr}; // acceptance tested per pair
    }
    return {1, ttr};
}

struct PairAccumulators {
    RealSequence ss;     // accepted (or plain) success kernel
    RealSequence sf;     // accepted (or plain) failure kernel
    RealSequence ws;     // success kernel weighted by output Werner parameter
};

// The O(ttr^2) iteration over all pairs of input delivery times, restricted
// to pairs the cut-off accepts. Covers plain units (spec == nullptr) as well.
PairAccumulators accumulate_pairs(const LinkState& a, const LinkState& b, UnitKind unit,
                                  const CutoffSpec* spec, const EvalConfig& cfg) {
    const std::int64_t ttr = a.pmf.ttr();
    const std::size_t n = a.pmf.values.size();
    const RealSequence decay = decay_table(cfg.hardware.t_coh, n);
    const double p_swap = cfg.hardware.p_swap;
    const bool fidelity = spec && spec->strategy == CutoffStrategy::Fidelity;
    const double w_cut = fidelity ? spec->w_cut : 0.0;

    const RealSequence& pa = a.pmf.values;
    const RealSequence& pb = b.pmf.values;
    const RealSequence& wa = a.werner;
    const RealSequence& wb = b.werner;

    PairAccumulators acc;
    acc.ss.assign(n, 0.0);
    acc.sf.assign(n, 0.0);
    acc.ws.assign(n, 0.0);

    const std::int64_t ta_max = (spec && spec->strategy == CutoffStrategy::MaxTime && !fidelity)
                                    ? std::min(ttr, spec->tau)
                                    : ttr;
    for (std::int64_t ta = 1; ta <= ta_max; ++ta) {
        const double pa_t = pa[ta];
        if (pa_t == 0.0) {
            continue;
        }
        const double wa_t = wa[ta];
        const PairWindow win = accept_window(spec, ta, ttr);

        // Region 1: tb <= ta, the attempt finishes at ta; b waited and decays.
        double r1_ss = 0.0;
        double r1_sf = 0.0;
        double r1_ws = 0.0;
        for (std::int64_t tb = win.lo; tb <= ta; ++tb) {
            const double pr = pa_t * pb[tb];
            if (pr == 0.0) {
                continue;
            }
            const double later_w = wa_t;
            const double earlier_w = wb[tb] * decay[ta - tb];
            if (fidelity && (later_w < w_cut || earlier_w < w_cut)) {
                continue; // rejected mass is collected by rejection_kernel
            }
            const double ww = later_w * earlier_w;
            if (unit == UnitKind::Swap) {
                r1_ss += pr;
                r1_ws += pr * ww;
            } else {
                const double pd = 0.5 * (1.0 + ww);
                r1_ss += pr * pd;
                r1_sf += pr * (1.0 - pd);
                r1_ws += pr * (later_w + earlier_w + 4.0 * ww) / 6.0;
            }
        }
        if (unit == UnitKind::Swap) {
            acc.ss[ta] += p_swap * r1_ss;
            acc.sf[ta] += (1.0 - p_swap) * r1_ss;
            acc.ws[ta] += p_swap * r1_ws;
        } else {
            acc.ss[ta] += r1_ss;
            acc.sf[ta] += r1_sf;
            acc.ws[ta] += r1_ws;
        }

        // Region 2: tb > ta, the attempt finishes at tb; a waited and decays.
        for (std::int64_t tb = ta + 1; tb <= win.hi; ++tb) {
            const double pr = pa_t * pb[tb];
            if (pr == 0.0) {
                continue;
            }
            const double later_w = wb[tb];
            const double earlier_w = wa_t * decay[tb - ta];
            if (fidelity && (later_w < w_cut || earlier_w < w_cut)) {
                continue;
            }
            const double ww = later_w * earlier_w;
            if (unit == UnitKind::Swap) {
                acc.ss[tb] += p_swap * pr;
                acc.sf[tb] += (1.0 - p_swap) * pr;
                acc.ws[tb] += p_swap * pr * ww;
            } else {
                const double pd = 0.5 * (1.0 + ww);
                acc.ss[tb] += pr * pd;
                acc.sf[tb] += pr * (1.0 - pd);
                acc.ws[tb] += pr * (later_w + earlier_w + 4.0 * ww) / 6.0;
            }
        }
    }
    return acc;
}

// Mass the cut-off rejects, recorded at the strategy's failure time. The
// time strategies depend on the partner only through its CDF up to the
// failure time, so the survival factor 1 - CDF(t) keeps the result exact
// under truncation.
RealSequence rejection_kernel(const LinkState& a, const LinkState& b, const CutoffSpec& spec,
                              const EvalConfig& cfg) {
    const std::int64_t ttr = a.pmf.ttr();
    const std::size_t n = a.pmf.values.size();
    RealSequence fail(n, 0.0);
    const RealSequence cdf_a = a.pmf.cdf();
    const RealSequence cdf_b = b.pmf.cdf();

    switch (spec.strategy) {
    case CutoffStrategy::DifTime: {
        for (std::int64_t t = spec.tau + 1; t <= ttr; ++t) {
            const std::int64_t s = t - spec.tau; // the earlier link's time
            const double surv_b = std::max(0.0, 1.0 - cdf_b[t]);
            const double surv_a = std::max(0.0, 1.0 - cdf_a[t]);
            fail[t] = a.pmf[s] * surv_b + b.pmf[s] * surv_a;
        }
        break;
    }
    case CutoffStrategy::MaxTime: {
        if (spec.tau >= 1 && spec.tau <= ttr) {
            fail[spec.tau] = std::max(0.0, 1.0 - cdf_a[spec.tau] * cdf_b[spec.tau]);
        } else if (spec.tau == 0) {
            fail[0] = 1.0; // nothing can arrive by t = 0
        }
        break;
    }
    case CutoffStrategy::Fidelity: {
        // Rejection is only known once both links exist: iterate pairs.
        const RealSequence decay = decay_table(cfg.hardware.t_coh, n);
        for (std::int64_t ta = 1; ta <= ttr; ++ta) {
            const double pa_t = a.pmf[ta];
            if (pa_t == 0.0) {
                continue;
            }
            for (std::int64_t tb = 1; tb <= ttr; ++tb) {
                const double pr = pa_t * b.pmf[tb];
                if (pr == 0.0) {
                    continue;
                }
                const std::int64_t t = std::max(ta, tb);
                const double wa_p = ta >= tb ? a.werner[ta] : a.werner[ta] * decay[tb - ta];
                const double wb_p = tb >= ta ? b.werner[tb] : b.werner[tb] * decay[ta - tb];
                if (wa_p < spec.w_cut || wb_p < spec.w_cut) {
                    fail[t] += pr;
                }
            }
        }
        break;
    }
    }
    return fail;
}

// ---------------------------------------------------------------------------
// Separable (linear-time) kernel construction.
//
// In the region ta >= tb the decayed Werner product separates as
// (W_A(ta)) * (W_B(tb) e^{-(ta-tb)/t_coh}); the inner sums over tb are
// sliding sums maintained relative to the current time, so no exponential
// ever exceeds 1.
// ---------------------------------------------------------------------------

struct SlidingSums {
    // over the partner index s in the acceptance window:
    double plain = 0.0;   // sum P[s]
    double decayed = 0.0; // sum P[s] W[s] e^{-(t-s)/t_coh}
};

PairAccumulators accumulate_separable(const LinkState& a, const LinkState& b, UnitKind unit,
                                      const CutoffSpec* spec, const EvalConfig& cfg) {
    if (spec && spec->strategy == CutoffStrategy::Fidelity) {
        throw ConfigError("the fidelity cut-off has no time-separable form; "
                          "use the direct or fourier backend");
    }
    const std::int64_t ttr = a.pmf.ttr();
    const std::size_t n = a.pmf.values.size();
    const double p_swap = cfg.hardware.p_swap;
    const double d1 = decay_step(cfg.hardware.t_coh);
    const bool dif = spec && spec->strategy == CutoffStrategy::DifTime;
    const std::int64_t tau = spec ? spec->tau : 0;
    const double dtau1 =
        dif ? (std::isinf(cfg.hardware.t_coh)
                   ? 1.0
                   : std::exp(-static_cast<double>(tau + 1) / cfg.hardware.t_coh))
            : 0.0;
    const std::int64_t t_max = (spec && spec->strategy == CutoffStrategy::MaxTime)
                                   ? std::min(ttr, spec->tau)
                                   : ttr;

    const RealSequence& pa = a.pmf.values;
    const RealSequence& pb = b.pmf.values;
    const RealSequence& wa = a.werner;
    const RealSequence& wb = b.werner;
    const RealSequence cdf_a = a.pmf.cdf();
    const RealSequence cdf_b = b.pmf.cdf();

    PairAccumulators acc;
    acc.ss.assign(n, 0.0);
    acc.sf.assign(n, 0.0);
    acc.ws.assign(n, 0.0);

    // Region 1 state: partner is b, window [lo(t), t].
    double dec_b = 0.0;
    // Region 2 state: partner is a, window [lo(t), t-1].
    double dec_a2 = 0.0;

    for (std::int64_t t = 1; t <= t_max; ++t) {
        const std::int64_t lo = dif ? std::max<std::int64_t>(1, t - tau) : 1;

        dec_b = dec_b * d1 + pb[t] * wb[t];
        dec_a2 = dec_a2 * d1 + pa[t - 1] * wa[t - 1] * d1;
        if (dif && t - tau - 1 >= 1) {
            dec_b -= pb[t - tau - 1] * wb[t - tau - 1] * dtau1;
            dec_a2 -= pa[t - tau - 1] * wa[t - tau - 1] * dtau1;
        }

        const double sum_b = cdf_b[t] - (lo >= 1 ? cdf_b[lo - 1] : 0.0);
        const double sum_a2 = cdf_a[t - 1] - (lo >= 1 ? cdf_a[lo - 1] : 0.0);
        const double win_dec_b = std::max(0.0, dec_b);
        const double win_dec_a2 = std::max(0.0, dec_a2);

        const double m_t = pa[t] * sum_b + pb[t] * sum_a2;
        const double prod_t = pa[t] * wa[t] * win_dec_b + pb[t] * wb[t] * win_dec_a2;

        if (unit == UnitKind::Swap) {
            acc.ss[t] = p_swap * m_t;
            acc.sf[t] = (1.0 - p_swap) * m_t;
            acc.ws[t] = p_swap * prod_t;
        } else {
            acc.ss[t] = 0.5 * (m_t + prod_t);
            acc.sf[t] = std::max(0.0, 0.5 * (m_t - prod_t));
            acc.ws[t] = (pa[t] * (wa[t] * sum_b + (1.0 + 4.0 * wa[t]) * win_dec_b) +
                         pb[t] * (wb[t] * sum_a2 + (1.0 + 4.0 * wb[t]) * win_dec_a2)) /
                        6.0;
        }
    }
    return acc;
}

LinkState finish_state(RealSequence pmf_values, const RealSequence& werner_numerator) {
    const std::size_t n = pmf_values.size();
    LinkState out;
    out.werner.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double p = pmf_values[t];
        if (p > 1.0) {
            if (p > 1.0 + 1e-9) {
                throw NumericalError("probability entry exceeds 1 at t = " + std::to_string(t));
            }
            p = 1.0;
            pmf_values[t] = 1.0;
        }
        if (p > 0.0) {
            out.werner[t] = std::clamp(werner_numerator[t] / p, 0.0, 1.0);
        }
    }
    out.pmf = TruncatedPmf(std::move(pmf_values));
    return out;
}

} // namespace

LinkState eval_gen(const EvalConfig& cfg, const GenOverride* override_) {
    const double p = override_ && override_->p_gen ? *override_->p_gen : cfg.hardware.p_gen;
    const double w0 = override_ && override_->w0 ? *override_->w0 : cfg.hardware.w0;
    if (!(p > 0.0 && p <= 1.0)) {
        throw ConfigError("p_gen must lie in (0, 1]");
    }
    const std::size_t n = static_cast<std::size_t>(cfg.ttr) + 1;
    LinkState out;
    out.pmf = TruncatedPmf(cfg.ttr);
    out.werner.assign(n, 0.0);
    double v = p;
    for (std::size_t t = 1; t < n; ++t) {
        out.pmf[t] = v;
        out.werner[t] = v > 0.0 ? w0 : 0.0;
        v *= 1.0 - p;
    }
    return out;
}

AttemptKernels swap_attempt_kernels(const LinkState& a, const LinkState& b,
                                    const EvalConfig& cfg) {
    check_window(a, b);
    PairAccumulators acc = accumulate_pairs(a, b, UnitKind::Swap, nullptr, cfg);
    return {std::move(acc.ss), std::move(acc.sf), std::move(acc.ws)};
}

AttemptKernels dist_attempt_kernels(const LinkState& a, const LinkState& b,
                                    const EvalConfig& cfg) {
    check_window(a, b);
    PairAccumulators acc = accumulate_pairs(a, b, UnitKind::Dist, nullptr, cfg);
    return {std::move(acc.ss), std::move(acc.sf), std::move(acc.ws)};
}

CutoffKernels cutoff_primed_kernels(const LinkState& a, const LinkState& b,
                                    const CutoffSpec& spec, UnitKind inner,
                                    const EvalConfig& cfg) {
    check_window(a, b);
    PairAccumulators acc = accumulate_pairs(a, b, inner, &spec, cfg);
    RealSequence fail = rejection_kernel(a, b, spec, cfg);
    return {std::move(fail), std::move(acc.ss), std::move(acc.sf), std::move(acc.ws)};
}

CutoffKernels cutoff_primed_kernels_separable(const LinkState& a, const LinkState& b,
                                              const CutoffSpec& spec, UnitKind inner,
                                              const EvalConfig& cfg) {
    check_window(a, b);
    PairAccumulators acc = accumulate_separable(a, b, inner, &spec, cfg);
    RealSequence fail = rejection_kernel(a, b, spec, cfg);
    return {std::move(fail), std::move(acc.ss), std::move(acc.sf), std::move(acc.ws)};
}

namespace {

bool all_zero(const RealSequence& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// No failure mass: the geometric series collapses to its first term.
std::vector<RealSequence> copy_series(const std::vector<const RealSequence*>& series) {
    std::vector<RealSequence> out;
    out.reserve(series.size());
    for (const RealSequence* s : series) {
        out.push_back(*s);
    }
    return out;
}

} // namespace

std::vector<RealSequence> compound_series_direct(const RealSequence& fail,
                                                 const std::vector<const RealSequence*>& series) {
    if (all_zero(fail)) {
        return copy_series(series);
    }
    const std::size_t n = fail.size();
    RealSequence renewal(n, 0.0);
    renewal[0] = 1.0;
    RealSequence chain(n, 0.0);
    chain[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        chain = convolve_linear(chain, fail);
        if (sum(chain) <= kSeriesTailCutoff) {
            break;
        }
        add_in_place(renewal, chain);
    }
    std::vector<RealSequence> out;
    out.reserve(series.size());
    for (const RealSequence* s : series) {
        RealSequence r = convolve_linear(renewal, *s);
        clamp_small_negatives(r, kNegativeClampTol);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RealSequence> compound_series_fourier(const RealSequence& fail,
                                                  const std::vector<const RealSequence*>& series,
                                                  int padding_factor) {
    if (all_zero(fail)) {
        return copy_series(series);
    }
    const std::size_t n = fail.size();
    if (padding_factor < 2) {
        throw ConfigError("padding_factor must be >= 2");
    }
    const std::size_t L = fft::next_pow2(static_cast<std::size_t>(padding_factor) * n);

    fft::ComplexVec buf(L, fft::Complex{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        buf[i] = fft::Complex{fail[i], 0.0};
    }
    fft::transform_pow2(buf, fft::Direction::Forward);

    fft::ComplexVec geometric(L);
    for (std::size_t j = 0; j < L; ++j) {
        const fft::Complex denom = fft::Complex{1.0, 0.0} - buf[j];
        if (std::abs(denom) < kSingularityTol) {
            throw NumericalError("Fourier compounding is singular: the failure kernel has "
                                 "full mass (success impossible)");
        }
        geometric[j] = fft::Complex{1.0, 0.0} / denom;
    }

    std::vector<RealSequence> out;
    out.reserve(series.size());
    for (const RealSequence* s : series) {
        std::fill(buf.begin(), buf.end(), fft::Complex{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            buf[i] = fft::Complex{(*s)[i], 0.0};
        }
        fft::transform_pow2(buf, fft::Direction::Forward);
        for (std::size_t j = 0; j < L; ++j) {
            buf[j] *= geometric[j];
        }
        fft::transform_pow2(buf, fft::Direction::Inverse);
        RealSequence r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = buf[i].real();
        }
        clamp_small_negatives(r, kNegativeClampTol);
        out.push_back(std::move(r));
    }
    return out;
}

AttemptKernels cutoff_attempt_kernels(const LinkState& a, const LinkState& b,
                                      const CutoffSpec& spec, UnitKind inner,
                                      const EvalConfig& cfg, bool use_swap_shortcut) {
    const CutoffKernels primed = cfg.backend == Backend::Fast
                                     ? cutoff_primed_kernels_separable(a, b, spec, inner, cfg)
                                     : cutoff_primed_kernels(a, b, spec, inner, cfg);
    const bool fourier = cfg.backend != Backend::Direct;

    AttemptKernels out;
    if (all_zero(primed.fail)) {
        // The cut-off never rejects: the guarded unit's kernels pass through.
        return {primed.ss, primed.sf, primed.ws_num};
    }
    if (inner == UnitKind::Swap && use_swap_shortcut) {
        // ss and sf differ only by the constant swap probability factor, so
        // the compounded kernels inherit the same ratio.
        const double ratio = (1.0 - cfg.hardware.p_swap) / cfg.hardware.p_swap;
        std::vector<RealSequence> r =
            fourier ? compound_series_fourier(primed.fail, {&primed.ss, &primed.ws_num},
                                              cfg.padding_factor)
                    : compound_series_direct(primed.fail, {&primed.ss, &primed.ws_num});
        out.ps = std::move(r[0]);
        out.ws_num = std::move(r[1]);
        out.pf = out.ps;
        scale_in_place(out.pf, ratio);
    } else {
        std::vector<RealSequence> r =
            fourier ? compound_series_fourier(primed.fail,
                                              {&primed.ss, &primed.sf, &primed.ws_num},
                                              cfg.padding_factor)
                    : compound_series_direct(primed.fail,
                                             {&primed.ss, &primed.sf, &primed.ws_num});
        out.ps = std::move(r[0]);
        out.pf = std::move(r[1]);
        out.ws_num = std::move(r[2]);
    }
    return out;
}

AttemptKernels attempt_kernels_separable(const LinkState& a, const LinkState& b, UnitKind unit,
                                         const CutoffSpec* spec, const EvalConfig& cfg) {
    check_window(a, b);
    if (!spec) {
        PairAccumulators acc = accumulate_separable(a, b, unit, nullptr, cfg);
        return {std::move(acc.ss), std::move(acc.sf), std::move(acc.ws)};
    }
    EvalConfig fast_cfg = cfg;
    fast_cfg.backend = Backend::Fast;
    return cutoff_attempt_kernels(a, b, *spec, unit, fast_cfg);
}

LinkState compound_direct(const AttemptKernels& kernels, const EvalConfig&) {
    std::vector<RealSequence> r =
        compound_series_direct(kernels.pf, {&kernels.ps, &kernels.ws_num});
    return finish_state(std::move(r[0]), r[1]);
}

LinkState compound_fourier(const AttemptKernels& kernels, const EvalConfig& cfg) {
    std::vector<RealSequence> r = compound_series_fourier(
        kernels.pf, {&kernels.ps, &kernels.ws_num}, cfg.padding_factor);
    return finish_state(std::move(r[0]), r[1]);
}

namespace {

void append_double(std::string& s, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    s += buf;
}

// Structural identity of a subtree: identical keys evaluate to identical
// link states, so siblings with equal keys are computed once.
void structural_key(const ProtocolNode& node, std::string& out) {
    switch (node.kind) {
    case UnitKind::Gen:
        out += 'g';
        if (node.override_) {
            out += '(';
            if (node.override_->p_gen) {
                out += "p=";
                append_double(out, *node.override_->p_gen);
            }
            if (node.override_->w0) {
                out += ",w=";
                append_double(out, *node.override_->w0);
            }
            out += ')';
        }
        return;
    case UnitKind::Swap:
        out += 's';
        break;
    case UnitKind::Dist:
        out += 'd';
        break;
    }
    if (node.cutoff) {
        out += '[';
        out += to_string(node.cutoff->strategy)[0];
        out += ':';
        if (node.cutoff->strategy == CutoffStrategy::Fidelity) {
            append_double(out, node.cutoff->w_cut);
        } else {
            out += std::to_string(node.cutoff->tau);
        }
        out += ']';
    }
    out += '(';
    structural_key(*node.left, out);
    out += ',';
    structural_key(*node.right, out);
    out += ')';
}

struct TreeEvaluator {
    const EvalConfig& cfg;
    std::unordered_map<std::string, std::shared_ptr<const LinkState>> memo;
    std::vector<NodeDiagnostics> diagnostics;

    std::shared_ptr<const LinkState> eval(const ProtocolNode& node) {
        std::string key;
        structural_key(node, key);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }

        std::shared_ptr<const LinkState> state;
        if (node.kind == UnitKind::Gen) {
            state = std::make_shared<LinkState>(
                eval_gen(cfg, node.override_ ? &*node.override_ : nullptr));
            record(node, *state, 0.0, 0.0);
        } else {
            auto a = eval(*node.left);
            auto b = eval(*node.right);
            AttemptKernels kernels = build_kernels(*a, *b, node);
            const double kernel_mass = sum(kernels.ps) + sum(kernels.pf);
            LinkState s = cfg.backend == Backend::Direct ? compound_direct(kernels, cfg)
                                                         : compound_fourier(kernels, cfg);
            state = std::make_shared<LinkState>(std::move(s));
            record(node, *state, kernel_mass, a->pmf.mass() * b->pmf.mass());
        }
        memo.emplace(std::move(key), state);
        return state;
    }

    AttemptKernels build_kernels(const LinkState& a, const LinkState& b,
                                 const ProtocolNode& node) const {
        if (node.cutoff) {
            if (cfg.backend == Backend::Fast &&
                node.cutoff->strategy == CutoffStrategy::Fidelity) {
                throw ConfigError("the fidelity cut-off is not supported by the fast backend; "
                                  "use direct or fourier");
            }
            return cutoff_attempt_kernels(a, b, *node.cutoff, node.kind, cfg);
        }
        if (cfg.backend == Backend::Fast) {
            return attempt_kernels_separable(a, b, node.kind, nullptr, cfg);
        }
        return node.kind == UnitKind::Swap ? swap_attempt_kernels(a, b, cfg)
                                           : dist_attempt_kernels(a, b, cfg);
    }

    void record(const ProtocolNode& node, const LinkState& state, double kernel_mass,
                double input_mass_product) {
        NodeDiagnostics d;
        d.kind = node.kind;
        d.has_cutoff = node.cutoff.has_value();
        d.kernel_mass = kernel_mass;
        d.input_mass_product = input_mass_product;
        d.covered_mass = state.pmf.mass();
        auto [wmin, wmax] = std::minmax_element(state.werner.begin(), state.werner.end());
        d.werner_min = *wmin;
        d.werner_max = *wmax;
        diagnostics.push_back(d);
    }
};

} // namespace

EvalResult eval_protocol(const ProtocolNode& root, const EvalConfig& cfg) {
    if (const std::string err = cfg.validate(); !err.empty()) {
        throw ConfigError(err);
    }
    if (const auto violations = validate_protocol(root); !violations.empty()) {
        throw ConfigError(violations.front());
    }

    TreeEvaluator evaluator{cfg, {}, {}};
    std::shared_ptr<const LinkState> state = evaluator.eval(root);

    EvalResult out;
    out.state = *state;
    out.covered_mass = out.state.pmf.mass();
    out.low_mass_warning = out.covered_mass < 0.99;
    out.nodes = std::move(evaluator.diagnostics);
    return out;
}

} // namespace repeater
