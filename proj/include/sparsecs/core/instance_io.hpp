#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sparsecs/core/problem.hpp"

namespace sparsecs {

/// JSON instance layout:
///   {"m", "n", "epsilon", "gamma", "weights", "A": [[row], ...], "b": [...]}
/// "gamma" and "weights" are optional on input (defaults sqrt(n) and ones).
ProblemInstance parse_instance(const std::string& json_text);
ProblemInstance read_instance(const std::filesystem::path& path);

/// Reals are written with 17 significant digits so files round-trip exactly.
std::string format_instance(const ProblemInstance& instance);
void write_instance(const std::filesystem::path& path, const ProblemInstance& instance);

/// "%.17g" rendering shared by every writer in the project.
std::string format_real(double value);

}  // namespace sparsecs
