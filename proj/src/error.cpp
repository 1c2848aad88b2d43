// SPDX-License-Identifier: Apache-2.0
#include "wsngain/error.hpp"

namespace wsngain {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InconsistentPlan: return "InconsistentPlan";
    case ErrorCode::DegenerateGains: return "DegenerateGains";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Eta0TooSmall: return "Eta0TooSmall";
    case ErrorCode::NoDescent: return "NoDescent";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace wsngain
