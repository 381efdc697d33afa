#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace repeater {

/// The four hardware parameters that, together with the protocol tree,
/// fully determine the entanglement distribution process.
struct HardwareParams {
    double p_gen = 1.0;  // per-attempt success probability of link generation, (0, 1]
    double p_swap = 1.0; // swap success probability, (0, 1]
    double w0 = 1.0;     // Werner parameter of a fresh elementary link, [0, 1]
    double t_coh = std::numeric_limits<double>::infinity(); // joint memory coherence time, > 0

    std::string validate() const;
};

enum class CutoffStrategy { DifTime, MaxTime, Fidelity };

std::string to_string(CutoffStrategy s);
CutoffStrategy cutoff_strategy_from_string(const std::string& s);

/// A cut-off condition attached to a swap or distillation node. Time
/// strategies use the integer threshold tau, the fidelity strategy uses the
/// Werner threshold w_cut.
struct CutoffSpec {
    CutoffStrategy strategy = CutoffStrategy::DifTime;
    std::int64_t tau = 0;
    double w_cut = 0.0;

    static CutoffSpec dif_time(std::int64_t tau) { return {CutoffStrategy::DifTime, tau, 0.0}; }
    static CutoffSpec max_time(std::int64_t tau) { return {CutoffStrategy::MaxTime, tau, 0.0}; }
    static CutoffSpec fidelity(double w_cut) { return {CutoffStrategy::Fidelity, 0, w_cut}; }

    bool operator==(const CutoffSpec&) const = default;
};

enum class UnitKind { Gen, Swap, Dist };

std::string to_string(UnitKind k);

/// Optional per-leaf hardware override; unset fields fall back to the global
/// HardwareParams.
struct GenOverride {
    std::optional<double> p_gen;
    std::optional<double> w0;

    bool operator==(const GenOverride&) const = default;
};

/// Node of the protocol tree. Leaves generate elementary links, internal
/// nodes combine the links of their two children by a swap or a
/// distillation, optionally guarded by a cut-off.
struct ProtocolNode {
    UnitKind kind = UnitKind::Gen;
    std::optional<CutoffSpec> cutoff;     // Swap/Dist only
    std::optional<GenOverride> override_; // Gen only
    std::unique_ptr<ProtocolNode> left;
    std::unique_ptr<ProtocolNode> right;

    static ProtocolNode gen() { return {}; }

    std::unique_ptr<ProtocolNode> clone() const;
    bool structurally_equal(const ProtocolNode& other) const;

    /// Number of elementary segments spanned by this subtree.
    std::int64_t segment_span() const;

    /// Leaf count / internal node count.
    std::int64_t count_leaves() const;
    std::int64_t count_internal() const;
};

std::unique_ptr<ProtocolNode> make_internal(UnitKind kind, std::unique_ptr<ProtocolNode> left,
                                            std::unique_ptr<ProtocolNode> right,
                                            std::optional<CutoffSpec> cutoff = std::nullopt);

enum class Backend { Direct, Fourier, Fast };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct EvalConfig {
    std::int64_t ttr = 1;          // truncation time, >= 1
    Backend backend = Backend::Fast;
    int padding_factor = 3;        // Fourier/Fast zero-padding multiple, >= 2
    HardwareParams hardware;

    std::string validate() const;
};

/// All structural rules a protocol tree must satisfy. Returns one message per
/// violation; an empty vector means the tree is valid.
std::vector<std::string> validate_protocol(const ProtocolNode& root);

/// Balanced swap tree over 2^levels segments. cutoffs may be empty (no
/// cut-offs), a single spec (applied at every level) or one spec per level,
/// ordered innermost (fewest segments spanned) to outermost.
std::unique_ptr<ProtocolNode> build_nested_chain(int levels,
                                                 const std::vector<CutoffSpec>& cutoffs);

} // namespace repeater
