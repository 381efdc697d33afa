#include "repeater/convolution.hpp"

#include "repeater/errors.hpp"
#include "repeater/fft.hpp"

#include <cmath>
#include <string>

namespace repeater {

namespace {

constexpr std::size_t kFftCrossover = 64;

RealSequence convolve_direct(const RealSequence& a, const RealSequence& b) {
    const std::size_t n = a.size();
    RealSequence out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        for (std::size_t tp = 0; tp <= t; ++tp) {
            s += a[t - tp] * b[tp];
        }
        out[t] = s;
    }
    return out;
}

RealSequence convolve_fft(const RealSequence& a, const RealSequence& b) {
    const std::size_t n = a.size();
    const std::size_t m = fft::next_pow2(2 * n - 1);
    RealSequence pa(m, 0.0);
    RealSequence pb(m, 0.0);
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());

    fft::ComplexVec sa;
    fft::ComplexVec sb;
    fft::forward_real_pair(pa, pb, sa, sb);
    for (std::size_t j = 0; j < m; ++j) {
        sa[j] *= sb[j];
    }
    fft::ComplexVec z = std::move(sa);
    fft::transform_pow2(z, fft::Direction::Inverse);

    RealSequence out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = z[t].real();
    }
    return out;
}

} // namespace

RealSequence convolve_linear(const RealSequence& a, const RealSequence& b) {
    if (a.size() != b.size()) {
        throw NumericalError("convolve_linear: length mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    }
    if (a.empty()) {
        throw NumericalError("convolve_linear: empty input");
    }
    if (a.size() < kFftCrossover) {
        return convolve_direct(a, b);
    }
    return convolve_fft(a, b);
}

RealSequence convolve_circular(const RealSequence& a, const RealSequence& b, std::size_t L) {
    if (L == 0) {
        throw NumericalError("convolve_circular: empty input");
    }
    if (a.size() != L || b.size() != L) {
        throw NumericalError("convolve_circular: inputs must have length L");
    }
    fft::ComplexVec sa = fft::dft(a, fft::Direction::Forward);
    fft::ComplexVec sb = fft::dft(b, fft::Direction::Forward);
    for (std::size_t j = 0; j < L; ++j) {
        sa[j] *= sb[j];
    }
    fft::ComplexVec z = fft::dft(sa, fft::Direction::Inverse);
    RealSequence out(L);
    for (std::size_t t = 0; t < L; ++t) {
        out[t] = z[t].real();
    }
    return out;
}

RealSequence prefix_sums(const RealSequence& weights, const RealSequence& g) {
    if (weights.size() != g.size()) {
        throw NumericalError("prefix_sums: length mismatch");
    }
    RealSequence out(weights.size());
    double s = 0.0;
    for (std::size_t t = 0; t < weights.size(); ++t) {
        s += weights[t] * g[t];
        out[t] = s;
    }
    return out;
}

RealSequence prefix_sums(const TruncatedPmf& weights, const RealSequence& g) {
    return prefix_sums(weights.values, g);
}

RealSequence elementwise_product(const RealSequence& a, const RealSequence& b) {
    if (a.size() != b.size()) {
        throw NumericalError("elementwise_product: length mismatch");
    }
    RealSequence out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] * b[i];
    }
    return out;
}

void scale_in_place(RealSequence& a, double factor) {
    for (double& v : a) {
        v *= factor;
    }
}

void add_in_place(RealSequence& a, const RealSequence& b) {
    if (a.size() != b.size()) {
        throw NumericalError("add_in_place: length mismatch");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += b[i];
    }
}

void clamp_small_negatives(RealSequence& a, double tolerance) {
    for (double& v : a) {
        if (v < 0.0) {
            if (v < -tolerance) {
                throw NumericalError("negative entry " + std::to_string(v) +
                                     " exceeds clamp tolerance " + std::to_string(tolerance));
            }
            v = 0.0;
        }
    }
}

std::string check_pmf_invariants(const TruncatedPmf& pmf) {
    if (pmf.values.empty()) {
        return "pmf is empty";
    }
    if (pmf.values[0] != 0.0) {
        return "pmf has mass at t = 0";
    }
    for (std::size_t t = 0; t < pmf.values.size(); ++t) {
        const double v = pmf.values[t];
        if (!(v >= 0.0 && v <= 1.0)) {
            return "pmf entry out of [0, 1] at t = " + std::to_string(t) +
                   " (value " + std::to_string(v) + ")";
        }
    }
    if (pmf.mass() > 1.0 + 1e-12) {
        return "pmf mass exceeds 1";
    }
    return {};
}

} // namespace repeater
