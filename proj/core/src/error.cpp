#include "rlr/error.hpp"

namespace rlr {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::ZeroRank: return "ZeroRank";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::DuplicateIndex: return "DuplicateIndex";
        case ErrorCode::EmptyObservation: return "EmptyObservation";
        case ErrorCode::Divergence: return "Divergence";
        case ErrorCode::ZeroWidth: return "ZeroWidth";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::UnreliableEstimate: return "UnreliableEstimate";
        case ErrorCode::NonPositiveRange: return "NonPositiveRange";
        case ErrorCode::InfeasibleFraction: return "InfeasibleFraction";
        case ErrorCode::Format: return "Format";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace rlr
