#pragma once

#include <string>
#include <vector>

namespace driftforge::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 config/argument error, 3 pipeline error.
enum ExitCode : int { kOk = 0, kConfigError = 2, kPipelineError = 3 };

// Runs the driftforge command line; args excludes the program name.
int run(const std::vector<std::string>& args);

// Lower-case hex SHA-256 of the given bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace driftforge::cli
