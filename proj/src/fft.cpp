#include "repeater/fft.hpp"

#include "repeater/errors.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_map>

namespace repeater::fft {

namespace {

// Twiddle factors exp(-2*pi*i*j/n) for j in [0, n/2). Tables are cached per
// length; the cache is thread-local so concurrent evaluations never contend.
struct TwiddleTable {
    std::size_t n = 0;
    ComplexVec w;
};

const TwiddleTable& table_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<TwiddleTable>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        auto table = std::make_unique<TwiddleTable>();
        table->n = n;
        table->w.resize(n / 2);
        const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
        for (std::size_t j = 0; j < n / 2; ++j) {
            table->w[j] = std::polar(1.0, step * static_cast<double>(j));
        }
        it = cache.emplace(n, std::move(table)).first;
    }
    return *it->second;
}

void bit_reverse_permute(std::span<Complex> a) {
    const std::size_t n = a.size();
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
}

} // namespace

std::size_t next_pow2(std::size_t n) {
    return std::bit_ceil(n == 0 ? std::size_t{1} : n);
}

void transform_pow2(std::span<Complex> data, Direction direction) {
    const std::size_t n = data.size();
    if (n == 0 || !std::has_single_bit(n)) {
        throw NumericalError("transform_pow2: length must be a power of two");
    }
    if (n == 1) {
        return;
    }
    const TwiddleTable& table = table_for(n);
    const bool inverse = direction == Direction::Inverse;

    bit_reverse_permute(data);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t block = 0; block < n; block += len) {
            std::size_t tw = 0;
            for (std::size_t k = 0; k < half; ++k) {
                Complex w = table.w[tw];
                if (inverse) {
                    w = std::conj(w);
                }
                const Complex t = data[block + k + half] * w;
                const Complex u = data[block + k];
                data[block + k] = u + t;
                data[block + k + half] = u - t;
                tw += step;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : data) {
            v *= scale;
        }
    }
}

namespace {

// Bluestein's algorithm: an arbitrary-length DFT as a power-of-two circular
// convolution with a quadratic chirp. Angles use k^2 mod 2L so they stay
// accurate for large indices.
ComplexVec bluestein(const ComplexVec& x, Direction direction) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = direction == Direction::Forward ? -1.0 : 1.0;
    const double base = sign * std::numbers::pi / static_cast<double>(n);

    ComplexVec chirp(n);
    const std::uint64_t mod = 2 * static_cast<std::uint64_t>(n);
    std::uint64_t k2 = 0; // k^2 mod 2n, updated incrementally
    for (std::size_t k = 0; k < n; ++k) {
        chirp[k] = std::polar(1.0, base * static_cast<double>(k2));
        k2 = (k2 + 2 * static_cast<std::uint64_t>(k) + 1) % mod;
    }

    ComplexVec a(m, Complex{0.0, 0.0});
    ComplexVec b(m, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = x[k] * chirp[k];
        b[k] = std::conj(chirp[k]);
    }
    for (std::size_t k = 1; k < n; ++k) {
        b[m - k] = b[k];
    }

    transform_pow2(a, Direction::Forward);
    transform_pow2(b, Direction::Forward);
    for (std::size_t k = 0; k < m; ++k) {
        a[k] *= b[k];
    }
    transform_pow2(a, Direction::Inverse);

    ComplexVec y(n);
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = a[k] * chirp[k];
    }
    if (direction == Direction::Inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : y) {
            v *= scale;
        }
    }
    return y;
}

} // namespace

ComplexVec dft(const ComplexVec& x, Direction direction) {
    if (x.empty()) {
        throw NumericalError("dft: empty input");
    }
    if (std::has_single_bit(x.size())) {
        ComplexVec y = x;
        transform_pow2(y, direction);
        return y;
    }
    return bluestein(x, direction);
}

ComplexVec dft(const std::vector<double>& x, Direction direction) {
    ComplexVec cx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        cx[i] = Complex{x[i], 0.0};
    }
    return dft(cx, direction);
}

void forward_real_pair(std::span<const double> a, std::span<const double> b,
                       ComplexVec& spectrum_a, ComplexVec& spectrum_b) {
    const std::size_t n = a.size();
    if (b.size() != n) {
        throw NumericalError("forward_real_pair: length mismatch");
    }
    ComplexVec z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = Complex{a[i], b[i]};
    }
    transform_pow2(z, Direction::Forward);

    spectrum_a.resize(n);
    spectrum_b.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Complex zj = z[j];
        const Complex zr = std::conj(z[(n - j) & (n - 1)]);
        spectrum_a[j] = 0.5 * (zj + zr);
        spectrum_b[j] = Complex{0.0, -0.5} * (zj - zr);
    }
}

void inverse_real_pair(const ComplexVec& spectrum_a, const ComplexVec& spectrum_b,
                       std::vector<double>& a, std::vector<double>& b) {
    const std::size_t n = spectrum_a.size();
    if (spectrum_b.size() != n) {
        throw NumericalError("inverse_real_pair: length mismatch");
    }
    ComplexVec z(n);
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = spectrum_a[j] + Complex{0.0, 1.0} * spectrum_b[j];
    }
    transform_pow2(z, Direction::Inverse);

    a.resize(n);
    b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = z[i].real();
        b[i] = z[i].imag();
    }
}

} // namespace repeater::fft
