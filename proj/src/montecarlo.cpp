#include "repeater/montecarlo.hpp"

#include "repeater/errors.hpp"
#include "repeater/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace repeater {

namespace {

std::int64_t sample_geometric(double p, Xoshiro256& rng) {
    if (p >= 1.0) {
        return 1;
    }
    const double u = rng.next_unit();
    const double t = std::ceil(std::log(u) / std::log1p(-p));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
}

struct SampleContext {
    const EvalConfig& cfg;
    Xoshiro256& rng;
    std::int64_t step_cap;
};

// Recursive per-unit sampler. Returns the delivery time and Werner parameter
// of the link this subtree produces; time accumulates over failed attempts.
McSample sample_node(const ProtocolNode& node, SampleContext& ctx) {
    if (node.kind == UnitKind::Gen) {
        const double p = node.override_ && node.override_->p_gen ? *node.override_->p_gen
                                                                 : ctx.cfg.hardware.p_gen;
        const double w0 =
            node.override_ && node.override_->w0 ? *node.override_->w0 : ctx.cfg.hardware.w0;
        return {sample_geometric(p, ctx.rng), w0};
    }

    const double t_coh = ctx.cfg.hardware.t_coh;
    std::int64_t elapsed = 0;
    while (true) {
        const McSample a = sample_node(*node.left, ctx);
        const McSample b = sample_node(*node.right, ctx);
        const std::int64_t t_max = std::max(a.t, b.t);
        const std::int64_t diff = std::abs(a.t - b.t);
        const double decay = std::isinf(t_coh)
                                 ? 1.0
                                 : std::exp(-static_cast<double>(diff) / t_coh);
        const double wa = a.t <= b.t && diff > 0 ? a.w * decay : a.w;
        const double wb = b.t < a.t ? b.w * decay : b.w;

        if (node.cutoff) {
            const CutoffSpec& c = *node.cutoff;
            bool accept = true;
            std::int64_t fail_time = 0;
            switch (c.strategy) {
            case CutoffStrategy::DifTime:
                accept = diff <= c.tau;
                fail_time = std::min(a.t, b.t) + c.tau;
                break;
            case CutoffStrategy::MaxTime:
                accept = t_max <= c.tau;
                fail_time = c.tau;
                break;
            case CutoffStrategy::Fidelity:
                accept = wa >= c.w_cut && wb >= c.w_cut;
                fail_time = t_max;
                break;
            }
            if (!accept) {
                elapsed += fail_time;
                if (elapsed > ctx.step_cap) {
                    return {ctx.step_cap + 1, 0.0};
                }
                continue;
            }
        }

        double p_success;
        double w_out;
        if (node.kind == UnitKind::Swap) {
            p_success = ctx.cfg.hardware.p_swap;
            w_out = wa * wb;
        } else {
            p_success = 0.5 * (1.0 + wa * wb);
            w_out = (wa + wb + 4.0 * wa * wb) / (6.0 * p_success);
        }
        if (ctx.rng.bernoulli(p_success)) {
            return {elapsed + t_max, w_out};
        }
        elapsed += t_max;
        if (elapsed > ctx.step_cap) {
            return {ctx.step_cap + 1, 0.0};
        }
    }
}

constexpr std::int64_t kChunkSize = 8192;

McEstimate sample_chunk(const ProtocolNode& root, const EvalConfig& cfg, std::uint64_t seed,
                        std::int64_t chunk_index, std::int64_t count) {
    McEstimate est;
    est.counts.assign(static_cast<std::size_t>(cfg.ttr) + 1, 0);
    est.werner_sum.assign(static_cast<std::size_t>(cfg.ttr) + 1, 0.0);
    Xoshiro256 rng = Xoshiro256::substream(seed, static_cast<std::uint64_t>(chunk_index));
    SampleContext ctx{cfg, rng, 1000000000};
    for (std::int64_t i = 0; i < count; ++i) {
        const McSample s = sample_node(root, ctx);
        if (s.t >= 1 && s.t <= cfg.ttr) {
            ++est.counts[s.t];
            est.werner_sum[s.t] += s.w;
        } else {
            ++est.overflow;
        }
    }
    est.n = count;
    return est;
}

} // namespace

std::vector<double> McEstimate::empirical_pmf() const {
    std::vector<double> out(counts.size(), 0.0);
    if (n == 0) {
        return out;
    }
    for (std::size_t t = 0; t < counts.size(); ++t) {
        out[t] = static_cast<double>(counts[t]) / static_cast<double>(n);
    }
    return out;
}

McSample sample_protocol(const ProtocolNode& root, const EvalConfig& cfg, Xoshiro256& rng,
                         std::int64_t step_cap) {
    SampleContext ctx{cfg, rng, step_cap};
    return sample_node(root, ctx);
}

McEstimate estimate_distribution(const ProtocolNode& root, const EvalConfig& cfg,
                                 std::int64_t n, std::uint64_t seed) {
    if (n < 1) {
        throw ConfigError("sample count must be >= 1");
    }
    if (const auto violations = validate_protocol(root); !violations.empty()) {
        throw ConfigError(violations.front());
    }

    const std::int64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<McEstimate> partials(static_cast<std::size_t>(chunks));

    const int workers = std::min<std::int64_t>(worker_count(), chunks);
    std::atomic<std::int64_t> next_chunk{0};
    auto run = [&]() {
        while (true) {
            const std::int64_t c = next_chunk.fetch_add(1);
            if (c >= chunks) {
                return;
            }
            const std::int64_t count = std::min(kChunkSize, n - c * kChunkSize);
            partials[static_cast<std::size_t>(c)] = sample_chunk(root, cfg, seed, c, count);
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(run);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    // Merge in chunk order: the result is independent of the worker count.
    McEstimate total;
    total.counts.assign(static_cast<std::size_t>(cfg.ttr) + 1, 0);
    total.werner_sum.assign(static_cast<std::size_t>(cfg.ttr) + 1, 0.0);
    total.seed = seed;
    for (const McEstimate& part : partials) {
        for (std::size_t t = 0; t < total.counts.size(); ++t) {
            total.counts[t] += part.counts[t];
            total.werner_sum[t] += part.werner_sum[t];
        }
        total.overflow += part.overflow;
        total.n += part.n;
    }
    return total;
}

ComparisonReport compare_to_exact(const McEstimate& estimate, const LinkState& exact) {
    if (estimate.ttr() != exact.pmf.ttr()) {
        throw ConfigError("estimate and exact distribution have different windows");
    }
    ComparisonReport report;
    const std::vector<double> exact_cdf = exact.pmf.cdf();
    const double covered = exact_cdf.back();
    const double n = static_cast<double>(estimate.n);

    // Empirical CDF over the window (overflow counts as "beyond ttr").
    std::vector<double> emp_cdf(estimate.counts.size(), 0.0);
    {
        std::int64_t acc = 0;
        for (std::size_t t = 0; t < estimate.counts.size(); ++t) {
            acc += estimate.counts[t];
            emp_cdf[t] = static_cast<double>(acc) / n;
        }
    }

    for (int d = 1; d <= 9; ++d) {
        const double q = covered * static_cast<double>(d) / 10.0;
        std::size_t t = 0;
        while (t + 1 < exact_cdf.size() && exact_cdf[t] < q) {
            ++t;
        }
        const double p0 = exact_cdf[t];
        const double sigma = std::sqrt(std::max(p0 * (1.0 - p0), 1e-300) / n);
        DecileCheck check;
        check.t = static_cast<std::int64_t>(t);
        check.exact_cdf = p0;
        check.empirical_cdf = emp_cdf[t];
        check.z = sigma > 0.0 ? (emp_cdf[t] - p0) / sigma : 0.0;
        report.deciles.push_back(check);
    }

    for (std::size_t t = 0; t < exact_cdf.size(); ++t) {
        report.max_cdf_gap = std::max(report.max_cdf_gap, std::abs(emp_cdf[t] - exact_cdf[t]));
    }

    // Per-time Werner means, judged against a Bernoulli-style deviation scale.
    std::int64_t within = 0;
    for (std::size_t t = 1; t < estimate.counts.size(); ++t) {
        if (estimate.counts[t] < 10 || exact.pmf[t] <= 0.0) {
            continue;
        }
        const double mean = estimate.werner_sum[t] / static_cast<double>(estimate.counts[t]);
        const double w = exact.werner[t];
        const double sigma =
            std::sqrt(std::max(w * (1.0 - w), 1e-4) / static_cast<double>(estimate.counts[t]));
        ++report.werner_bins_checked;
        if (std::abs(mean - w) <= 3.0 * sigma) {
            ++within;
        }
    }
    report.werner_within_3sigma_fraction =
        report.werner_bins_checked > 0
            ? static_cast<double>(within) / static_cast<double>(report.werner_bins_checked)
            : 1.0;

    report.pass = std::all_of(report.deciles.begin(), report.deciles.end(),
                              [](const DecileCheck& c) { return std::abs(c.z) <= 4.0; });
    return report;
}

} // namespace repeater
