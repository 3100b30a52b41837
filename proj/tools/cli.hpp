#pragma once

#include <atomic>
#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

namespace sparsecs::cli {

/// Exit codes: 0 success, 1 usage or data error, 2 infeasible instance (or,
/// for verify-certificate, a certificate that fails the checks).
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kInfeasible = 2;

/// "600s", "10m", "1h", "250ms", or a bare number of seconds; "inf" or "none"
/// for no limit. Throws std::invalid_argument.
std::chrono::duration<double> parse_duration(const std::string& text);

/// Runs `sparsecs <args...>` (args excludes the program name). `cancel` is
/// raised by the signal handler in main to stop a sweep.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::atomic<bool>* cancel = nullptr);

}  // namespace sparsecs::cli
