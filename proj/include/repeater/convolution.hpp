#pragma once

#include "repeater/pmf.hpp"

#include <cstdint>
#include <vector>

namespace repeater {

using RealSequence = std::vector<double>;

/// Linear convolution truncated to the window of the inputs:
/// out[t] = sum_{t'=0..t} a[t-t'] * b[t'], with out.size() == a.size().
/// Inputs must have equal length. Lengths >= 64 go through the fast
/// transform, shorter ones use the direct quadratic loop.
RealSequence convolve_linear(const RealSequence& a, const RealSequence& b);

/// Circular convolution of two length-L sequences: the linear convolution
/// folded modulo L. Implemented as forward transform, elementwise product,
/// inverse transform.
RealSequence convolve_circular(const RealSequence& a, const RealSequence& b, std::size_t L);

/// out[t] = sum_{s<=t} weights[s] * g[s]; linear time.
RealSequence prefix_sums(const TruncatedPmf& weights, const RealSequence& g);
RealSequence prefix_sums(const RealSequence& weights, const RealSequence& g);

/// Elementwise helpers shared by the evaluation pipelines.
RealSequence elementwise_product(const RealSequence& a, const RealSequence& b);
void scale_in_place(RealSequence& a, double factor);
void add_in_place(RealSequence& a, const RealSequence& b);

/// Replace tiny negative entries (cancellation noise from inverse transforms)
/// with zero. Entries more negative than -tolerance raise NumericalError.
void clamp_small_negatives(RealSequence& a, double tolerance);

} // namespace repeater
