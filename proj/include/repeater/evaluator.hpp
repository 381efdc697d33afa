#pragma once

#include "repeater/convolution.hpp"
#include "repeater/pmf.hpp"
#include "repeater/protocol.hpp"

#include <cstdint>
#include <vector>

namespace repeater {

/// Full description of one entangled-link random variable: the delivery-time
/// distribution and the average Werner parameter of links delivered at each
/// time step. werner[t] == 0 wherever pmf[t] == 0.
struct LinkState {
    TruncatedPmf pmf;
    RealSequence werner;
};

/// Joint time/outcome distributions of a single attempt of a unit:
/// ps[t] = Pr(attempt takes t and succeeds), pf[t] = Pr(takes t and fails),
/// ws_num[t] = success- and output-Werner-weighted mass, i.e. ps[t] * W_suc(t).
struct AttemptKernels {
    RealSequence ps;
    RealSequence pf;
    RealSequence ws_num;
};

/// Primed kernels of a cut-off guarded unit: one round of link preparation
/// classified as rejected by the cut-off (fail), accepted but unit failed
/// (sf), or accepted and unit succeeded (ss). ws_num weights ss by the output
/// Werner parameter.
struct CutoffKernels {
    RealSequence fail;
    RealSequence ss;
    RealSequence sf;
    RealSequence ws_num;
};

struct NodeDiagnostics {
    UnitKind kind = UnitKind::Gen;
    bool has_cutoff = false;
    double kernel_mass = 0.0;        // sum(ps + pf)
    double input_mass_product = 0.0; // mass(A) * mass(B)
    double covered_mass = 0.0;       // output Pr(T <= ttr)
    double werner_min = 0.0;
    double werner_max = 0.0;
};

struct EvalResult {
    LinkState state;
    double covered_mass = 0.0;
    bool low_mass_warning = false;
    std::vector<NodeDiagnostics> nodes;
};

/// Elementary link generation: geometric waiting time with parameter p_gen
/// and constant Werner parameter w0.
LinkState eval_gen(const EvalConfig& cfg, const GenOverride* override_ = nullptr);

/// Reference O(ttr^2) kernels, iterating over every pair of input times.
AttemptKernels swap_attempt_kernels(const LinkState& a, const LinkState& b,
                                    const EvalConfig& cfg);
AttemptKernels dist_attempt_kernels(const LinkState& a, const LinkState& b,
                                    const EvalConfig& cfg);

/// Primed kernels for a cut-off guarded unit, O(ttr^2) pairwise path.
CutoffKernels cutoff_primed_kernels(const LinkState& a, const LinkState& b,
                                    const CutoffSpec& spec, UnitKind inner,
                                    const EvalConfig& cfg);

/// O(ttr) kernels via prefix/sliding sums over the separable form of the
/// unit's success probability. Supports no cut-off and the two time cut-off
/// strategies; the fidelity strategy has no time-separable form.
AttemptKernels attempt_kernels_separable(const LinkState& a, const LinkState& b, UnitKind unit,
                                         const CutoffSpec* spec, const EvalConfig& cfg);
CutoffKernels cutoff_primed_kernels_separable(const LinkState& a, const LinkState& b,
                                              const CutoffSpec& spec, UnitKind inner,
                                              const EvalConfig& cfg);

/// sum_{k>=1} fail^{*(k-1)} * series_i for each requested series, truncated
/// to the window of the inputs. The direct form iterates convolutions until
/// the residual mass of the failure chain drops below 1e-15; the Fourier
/// form evaluates the geometric series on zero-padded arrays of length
/// >= padding_factor * window.
std::vector<RealSequence> compound_series_direct(const RealSequence& fail,
                                                 const std::vector<const RealSequence*>& series);
std::vector<RealSequence> compound_series_fourier(const RealSequence& fail,
                                                  const std::vector<const RealSequence*>& series,
                                                  int padding_factor);

/// Compound the inner cut-off loop into the attempt kernels of the guarded
/// unit. When the inner unit is a swap the constant success probability is
/// factored out (sf derived from ss); use_swap_shortcut=false forces the
/// generic route, which must agree.
AttemptKernels cutoff_attempt_kernels(const LinkState& a, const LinkState& b,
                                      const CutoffSpec& spec, UnitKind inner,
                                      const EvalConfig& cfg, bool use_swap_shortcut = true);

/// Aggregate attempt kernels over all numbers of attempts (every sequence of
/// failures ending in one success).
LinkState compound_direct(const AttemptKernels& kernels, const EvalConfig& cfg);
LinkState compound_fourier(const AttemptKernels& kernels, const EvalConfig& cfg);

/// Post-order evaluation of a whole protocol tree. Structurally identical
/// sibling subtrees are evaluated once. Emits one diagnostics record per
/// distinct internal node.
EvalResult eval_protocol(const ProtocolNode& root, const EvalConfig& cfg);

} // namespace repeater
