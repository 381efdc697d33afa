#pragma once

#include <complex>
#include <span>
#include <vector>

namespace repeater::fft {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

enum class Direction { Forward, Inverse };

/// Discrete Fourier transform of an arbitrary-length sequence.
/// Forward: y_j = sum_k x_k exp(-2*pi*i*j*k/L). Inverse is the exact inverse
/// (includes the 1/L factor). Power-of-two lengths use an iterative radix-2
/// transform; other lengths go through Bluestein's chirp-z reduction, so the
/// cost is O(L log L) for every L.
ComplexVec dft(const ComplexVec& x, Direction direction);

/// Convenience overload for real input.
ComplexVec dft(const std::vector<double>& x, Direction direction);

/// In-place radix-2 transform. data.size() must be a power of two.
void transform_pow2(std::span<Complex> data, Direction direction);

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

/// Forward transforms of two real sequences of length L (a power of two),
/// computed with a single complex transform of a + i*b.
void forward_real_pair(std::span<const double> a, std::span<const double> b,
                       ComplexVec& spectrum_a, ComplexVec& spectrum_b);

/// Inverse transforms of two spectra whose time-domain images are known to be
/// real, computed with a single complex transform of A + i*B.
void inverse_real_pair(const ComplexVec& spectrum_a, const ComplexVec& spectrum_b,
                       std::vector<double>& a, std::vector<double>& b);

} // namespace repeater::fft
