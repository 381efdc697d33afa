#pragma once

#include "repeater/evaluator.hpp"

#include <string>
#include <vector>

namespace repeater::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Entry point shared by the binary and the in-process tests.
/// Exit codes: 0 success, 1 failed comparison, 2 config error, 3 numerical error.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

/// Distribution file helpers (CSV schema: t,pmf,cdf,werner,fidelity with 17
/// significant digits; JSON mirrors the same columns as arrays).
void write_distribution_csv(const std::string& path, const LinkState& state);
LinkState read_distribution_file(const std::string& path); // .csv or .json

} // namespace repeater::cli
