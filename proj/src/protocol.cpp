#include "repeater/protocol.hpp"

#include "repeater/errors.hpp"

#include <cmath>

namespace repeater {

std::string HardwareParams::validate() const {
    if (!(p_gen > 0.0 && p_gen <= 1.0)) {
        return "p_gen must lie in (0, 1]";
    }
    if (!(p_swap > 0.0 && p_swap <= 1.0)) {
        return "p_swap must lie in (0, 1]";
    }
    if (!(w0 >= 0.0 && w0 <= 1.0)) {
        return "w0 must lie in [0, 1]";
    }
    if (!(t_coh > 0.0)) { // infinity is fine
        return "t_coh must be positive";
    }
    return {};
}

std::string to_string(CutoffStrategy s) {
    switch (s) {
    case CutoffStrategy::DifTime: return "dif_time";
    case CutoffStrategy::MaxTime: return "max_time";
    case CutoffStrategy::Fidelity: return "fidelity";
    }
    return "?";
}

CutoffStrategy cutoff_strategy_from_string(const std::string& s) {
    if (s == "dif_time") return CutoffStrategy::DifTime;
    if (s == "max_time") return CutoffStrategy::MaxTime;
    if (s == "fidelity") return CutoffStrategy::Fidelity;
    throw ConfigError("unknown cut-off strategy '" + s + "'");
}

std::string to_string(UnitKind k) {
    switch (k) {
    case UnitKind::Gen: return "gen";
    case UnitKind::Swap: return "swap";
    case UnitKind::Dist: return "dist";
    }
    return "?";
}

std::string to_string(Backend b) {
    switch (b) {
    case Backend::Direct: return "direct";
    case Backend::Fourier: return "fourier";
    case Backend::Fast: return "fast";
    }
    return "?";
}

Backend backend_from_string(const std::string& s) {
    if (s == "direct") return Backend::Direct;
    if (s == "fourier") return Backend::Fourier;
    if (s == "fast") return Backend::Fast;
    throw ConfigError("unknown backend '" + s + "'");
}

std::unique_ptr<ProtocolNode> ProtocolNode::clone() const {
    auto node = std::make_unique<ProtocolNode>();
    node->kind = kind;
    node->cutoff = cutoff;
    node->override_ = override_;
    if (left) {
        node->left = left->clone();
    }
    if (right) {
        node->right = right->clone();
    }
    return node;
}

bool ProtocolNode::structurally_equal(const ProtocolNode& other) const {
    if (kind != other.kind || cutoff != other.cutoff || override_ != other.override_) {
        return false;
    }
    if ((left == nullptr) != (other.left == nullptr) ||
        (right == nullptr) != (other.right == nullptr)) {
        return false;
    }
    if (left && !left->structurally_equal(*other.left)) {
        return false;
    }
    if (right && !right->structurally_equal(*other.right)) {
        return false;
    }
    return true;
}

std::int64_t ProtocolNode::segment_span() const {
    if (kind == UnitKind::Gen) {
        return 1;
    }
    if (!left || !right) {
        return 0;
    }
    if (kind == UnitKind::Dist) {
        // both input links cover the same node pair
        return left->segment_span();
    }
    return left->segment_span() + right->segment_span();
}

std::int64_t ProtocolNode::count_leaves() const {
    if (!left && !right) {
        return 1;
    }
    std::int64_t n = 0;
    if (left) n += left->count_leaves();
    if (right) n += right->count_leaves();
    return n;
}

std::int64_t ProtocolNode::count_internal() const {
    if (!left && !right) {
        return 0;
    }
    std::int64_t n = 1;
    if (left) n += left->count_internal();
    if (right) n += right->count_internal();
    return n;
}

std::unique_ptr<ProtocolNode> make_internal(UnitKind kind, std::unique_ptr<ProtocolNode> left,
                                            std::unique_ptr<ProtocolNode> right,
                                            std::optional<CutoffSpec> cutoff) {
    auto node = std::make_unique<ProtocolNode>();
    node->kind = kind;
    node->left = std::move(left);
    node->right = std::move(right);
    node->cutoff = std::move(cutoff);
    return node;
}

std::string EvalConfig::validate() const {
    if (ttr < 1) {
        return "ttr must be >= 1";
    }
    if (padding_factor < 2) {
        return "padding_factor must be >= 2";
    }
    return hardware.validate();
}

namespace {

void validate_node(const ProtocolNode& node, const std::string& path,
                   std::vector<std::string>& out) {
    const bool is_leaf = !node.left && !node.right;
    if (node.kind == UnitKind::Gen) {
        if (!is_leaf) {
            out.push_back(path + ": gen node must be a leaf");
        }
        if (node.cutoff) {
            out.push_back(path + ": cut-off attached to a gen node");
        }
        if (node.override_) {
            if (node.override_->p_gen &&
                !(*node.override_->p_gen > 0.0 && *node.override_->p_gen <= 1.0)) {
                out.push_back(path + ": override p_gen outside (0, 1]");
            }
            if (node.override_->w0 &&
                !(*node.override_->w0 >= 0.0 && *node.override_->w0 <= 1.0)) {
                out.push_back(path + ": override w0 outside [0, 1]");
            }
        }
        return;
    }

    if (!node.left || !node.right) {
        out.push_back(path + ": " + to_string(node.kind) + " node needs exactly two children");
        // keep walking whatever children exist
    }
    if (node.override_) {
        out.push_back(path + ": hardware override on an internal node");
    }
    if (node.cutoff) {
        const CutoffSpec& c = *node.cutoff;
        if (c.strategy == CutoffStrategy::Fidelity) {
            if (!(c.w_cut >= 0.0 && c.w_cut <= 1.0)) {
                out.push_back(path + ": fidelity cut-off threshold outside [0, 1]");
            }
        } else if (c.tau < 0) {
            out.push_back(path + ": cut-off time threshold is negative");
        }
    }
    if (node.kind == UnitKind::Dist && node.left && node.right &&
        node.left->segment_span() != node.right->segment_span()) {
        out.push_back(path + ": dist children must span the same node pair");
    }
    if (node.left) {
        validate_node(*node.left, path + ".left", out);
    }
    if (node.right) {
        validate_node(*node.right, path + ".right", out);
    }
}

} // namespace

std::vector<std::string> validate_protocol(const ProtocolNode& root) {
    std::vector<std::string> out;
    validate_node(root, "protocol", out);
    return out;
}

std::unique_ptr<ProtocolNode> build_nested_chain(int levels,
                                                 const std::vector<CutoffSpec>& cutoffs) {
    if (levels < 0) {
        throw ConfigError("nested chain levels must be >= 0");
    }
    const std::size_t n = cutoffs.size();
    if (n != 0 && n != 1 && n != static_cast<std::size_t>(levels)) {
        throw ConfigError("nested chain expects 0, 1 or 'levels' cut-off specs, got " +
                          std::to_string(n));
    }

    auto tree = std::make_unique<ProtocolNode>();
    for (int level = 1; level <= levels; ++level) {
        std::optional<CutoffSpec> cutoff;
        if (n == 1) {
            cutoff = cutoffs[0];
        } else if (n > 1) {
            cutoff = cutoffs[static_cast<std::size_t>(level - 1)];
        }
        auto sibling = tree->clone();
        tree = make_internal(UnitKind::Swap, std::move(tree), std::move(sibling),
                             std::move(cutoff));
    }
    return tree;
}

} // namespace repeater
