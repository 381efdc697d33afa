#pragma once

#include "repeater/protocol.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace repeater {

struct ParsedConfig {
    std::unique_ptr<ProtocolNode> protocol;
    EvalConfig eval;
};

/// Parse and fully validate a JSON config document. Unknown keys are
/// rejected; syntax errors carry line/column, semantic errors name the
/// offending field. Throws ConfigError.
ParsedConfig parse_config(const std::string& text);

/// Canonical JSON serialization of a config (sorted keys, "inf" encoding for
/// an infinite coherence time). parse_config(serialize_config(c)) yields an
/// equal config.
std::string serialize_config(const ParsedConfig& config);

/// Stable 64-bit FNV-1a hash of the canonical serialization, hex encoded.
std::string config_hash(const ParsedConfig& config);

} // namespace repeater
