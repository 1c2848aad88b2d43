// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsngain {

enum class ErrorCode {
    InvalidEdge,
    DisconnectedGraph,
    GenerationFailed,
    InvalidConfig,
    InconsistentPlan,
    DegenerateGains,
    NoConvergence,
    Eta0TooSmall,
    NoDescent,
    TooLarge,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. The code is what the CLI reports in its error JSON.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace wsngain
