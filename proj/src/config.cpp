#include "repeater/config.hpp"

#include "repeater/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace repeater {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing field '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + ": field '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::int64_t require_integer(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing field '" + key + "'");
    }
    const json& v = obj.at(key);
    if (v.is_number_integer()) {
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        const double r = std::floor(d);
        if (r == d && std::abs(d) < 9.0e15) {
            return static_cast<std::int64_t>(r);
        }
    }
    throw ConfigError(where + ": field '" + key + "' must be an integer");
}

// t_coh accepts a positive number or the string "inf".
double parse_coherence_time(const json& v, const std::string& where) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") {
            return std::numeric_limits<double>::infinity();
        }
        throw ConfigError(where + ": t_coh string must be \"inf\"");
    }
    if (!v.is_number()) {
        throw ConfigError(where + ": t_coh must be a number or \"inf\"");
    }
    return v.get<double>();
}

CutoffSpec parse_cutoff(const json& obj, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": cutoff must be an object or null");
    }
    reject_unknown_keys(obj, {"strategy", "tau", "w_cut"}, where);
    if (!obj.contains("strategy") || !obj.at("strategy").is_string()) {
        throw ConfigError(where + ": cutoff needs a string 'strategy'");
    }
    const CutoffStrategy strategy = cutoff_strategy_from_string(obj.at("strategy"));
    CutoffSpec spec;
    spec.strategy = strategy;
    if (strategy == CutoffStrategy::Fidelity) {
        if (obj.contains("tau")) {
            throw ConfigError(where + ": fidelity cutoff takes 'w_cut', not 'tau'");
        }
        spec.w_cut = require_number(obj, "w_cut", where);
    } else {
        if (obj.contains("w_cut")) {
            throw ConfigError(where + ": time cutoff takes 'tau', not 'w_cut'");
        }
        spec.tau = require_integer(obj, "tau", where);
    }
    return spec;
}

std::unique_ptr<ProtocolNode> parse_node(const json& obj, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": protocol node must be an object");
    }
    if (!obj.contains("type") || !obj.at("type").is_string()) {
        throw ConfigError(where + ": node needs a string 'type'");
    }
    const std::string type = obj.at("type");

    if (type == "gen") {
        reject_unknown_keys(obj, {"type", "override"}, where);
        if (obj.contains("cutoff")) {
            throw ConfigError(where + ": cut-off attached to a gen node");
        }
        auto node = std::make_unique<ProtocolNode>();
        if (obj.contains("override")) {
            const json& ov = obj.at("override");
            reject_unknown_keys(ov, {"p_gen", "w0"}, where + ".override");
            GenOverride o;
            if (ov.contains("p_gen")) {
                o.p_gen = require_number(ov, "p_gen", where + ".override");
            }
            if (ov.contains("w0")) {
                o.w0 = require_number(ov, "w0", where + ".override");
            }
            node->override_ = o;
        }
        return node;
    }

    if (type != "swap" && type != "dist") {
        throw ConfigError(where + ": unknown node type '" + type + "'");
    }
    reject_unknown_keys(obj, {"type", "cutoff", "left", "right"}, where);
    if (!obj.contains("left") || !obj.contains("right")) {
        throw ConfigError(where + ": " + type + " node needs 'left' and 'right' children");
    }
    auto node = std::make_unique<ProtocolNode>();
    node->kind = type == "swap" ? UnitKind::Swap : UnitKind::Dist;
    if (obj.contains("cutoff") && !obj.at("cutoff").is_null()) {
        node->cutoff = parse_cutoff(obj.at("cutoff"), where + ".cutoff");
    }
    node->left = parse_node(obj.at("left"), where + ".left");
    node->right = parse_node(obj.at("right"), where + ".right");
    return node;
}

std::unique_ptr<ProtocolNode> parse_nested_swap(const json& obj) {
    reject_unknown_keys(obj, {"levels", "strategy", "cutoffs"}, "nested_swap");
    const std::int64_t levels = require_integer(obj, "levels", "nested_swap");
    if (levels < 0 || levels > 30) {
        throw ConfigError("nested_swap: levels out of range");
    }
    std::vector<CutoffSpec> cutoffs;
    if (obj.contains("cutoffs")) {
        if (!obj.at("cutoffs").is_array()) {
            throw ConfigError("nested_swap: 'cutoffs' must be an array");
        }
        const CutoffStrategy strategy =
            obj.contains("strategy")
                ? cutoff_strategy_from_string(obj.at("strategy").get<std::string>())
                : CutoffStrategy::DifTime;
        for (const json& v : obj.at("cutoffs")) {
            if (!v.is_number()) {
                throw ConfigError("nested_swap: cutoff thresholds must be numbers");
            }
            if (strategy == CutoffStrategy::Fidelity) {
                cutoffs.push_back(CutoffSpec::fidelity(v.get<double>()));
            } else {
                CutoffSpec spec;
                spec.strategy = strategy;
                spec.tau = static_cast<std::int64_t>(std::llround(v.get<double>()));
                cutoffs.push_back(spec);
            }
        }
    } else if (obj.contains("strategy")) {
        throw ConfigError("nested_swap: 'strategy' given without 'cutoffs'");
    }
    return build_nested_chain(static_cast<int>(levels), cutoffs);
}

json cutoff_to_json(const CutoffSpec& spec) {
    json out;
    out["strategy"] = to_string(spec.strategy);
    if (spec.strategy == CutoffStrategy::Fidelity) {
        out["w_cut"] = spec.w_cut;
    } else {
        out["tau"] = spec.tau;
    }
    return out;
}

json node_to_json(const ProtocolNode& node) {
    json out;
    out["type"] = to_string(node.kind);
    if (node.kind == UnitKind::Gen) {
        if (node.override_) {
            json ov = json::object();
            if (node.override_->p_gen) {
                ov["p_gen"] = *node.override_->p_gen;
            }
            if (node.override_->w0) {
                ov["w0"] = *node.override_->w0;
            }
            out["override"] = ov;
        }
        return out;
    }
    out["cutoff"] = node.cutoff ? cutoff_to_json(*node.cutoff) : json(nullptr);
    out["left"] = node_to_json(*node.left);
    out["right"] = node_to_json(*node.right);
    return out;
}

} // namespace

ParsedConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line/column for the diagnostic.
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    reject_unknown_keys(doc, {"version", "hardware", "eval", "protocol", "nested_swap"},
                        "config");

    if (require_integer(doc, "version", "config") != 1) {
        throw ConfigError("config: unsupported version (expected 1)");
    }

    ParsedConfig out;

    if (!doc.contains("hardware") || !doc.at("hardware").is_object()) {
        throw ConfigError("config: missing 'hardware' object");
    }
    const json& hw = doc.at("hardware");
    reject_unknown_keys(hw, {"p_gen", "p_swap", "w0", "t_coh"}, "hardware");
    out.eval.hardware.p_gen = require_number(hw, "p_gen", "hardware");
    out.eval.hardware.p_swap = require_number(hw, "p_swap", "hardware");
    out.eval.hardware.w0 = require_number(hw, "w0", "hardware");
    if (!hw.contains("t_coh")) {
        throw ConfigError("hardware: missing field 't_coh'");
    }
    out.eval.hardware.t_coh = parse_coherence_time(hw.at("t_coh"), "hardware");

    if (!doc.contains("eval") || !doc.at("eval").is_object()) {
        throw ConfigError("config: missing 'eval' object");
    }
    const json& ev = doc.at("eval");
    reject_unknown_keys(ev, {"ttr", "backend", "padding_factor"}, "eval");
    out.eval.ttr = require_integer(ev, "ttr", "eval");
    if (ev.contains("backend")) {
        if (!ev.at("backend").is_string()) {
            throw ConfigError("eval: 'backend' must be a string");
        }
        out.eval.backend = backend_from_string(ev.at("backend"));
    }
    if (ev.contains("padding_factor")) {
        out.eval.padding_factor = static_cast<int>(require_integer(ev, "padding_factor", "eval"));
    }

    const bool has_protocol = doc.contains("protocol");
    const bool has_nested = doc.contains("nested_swap");
    if (has_protocol == has_nested) {
        throw ConfigError("config: exactly one of 'protocol' or 'nested_swap' is required");
    }
    out.protocol = has_protocol ? parse_node(doc.at("protocol"), "protocol")
                                : parse_nested_swap(doc.at("nested_swap"));

    if (const std::string err = out.eval.validate(); !err.empty()) {
        throw ConfigError("config: " + err);
    }
    const std::vector<std::string> violations = validate_protocol(*out.protocol);
    if (!violations.empty()) {
        throw ConfigError("config: " + violations.front());
    }
    return out;
}

std::string serialize_config(const ParsedConfig& config) {
    json doc;
    doc["version"] = 1;
    json hw;
    hw["p_gen"] = config.eval.hardware.p_gen;
    hw["p_swap"] = config.eval.hardware.p_swap;
    hw["w0"] = config.eval.hardware.w0;
    if (std::isinf(config.eval.hardware.t_coh)) {
        hw["t_coh"] = "inf";
    } else {
        hw["t_coh"] = config.eval.hardware.t_coh;
    }
    doc["hardware"] = hw;
    json ev;
    ev["ttr"] = config.eval.ttr;
    ev["backend"] = to_string(config.eval.backend);
    ev["padding_factor"] = config.eval.padding_factor;
    doc["eval"] = ev;
    doc["protocol"] = node_to_json(*config.protocol);
    return doc.dump(2);
}

std::string config_hash(const ParsedConfig& config) {
    const std::string canonical = serialize_config(config);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

} // namespace repeater
