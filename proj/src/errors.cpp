#include "errors.hpp"

namespace banditlab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NormViolation: return "NormViolation";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::DuplicateArm: return "DuplicateArm";
        case ErrorCode::NonUniqueOptimum: return "NonUniqueOptimum";
        case ErrorCode::MeanOutOfRange: return "MeanOutOfRange";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SingularDirection: return "SingularDirection";
        case ErrorCode::NotPD: return "NotPD";
        case ErrorCode::EmptySamples: return "EmptySamples";
        case ErrorCode::BadBounds: return "BadBounds";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::NonFiniteGaps: return "NonFiniteGaps";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::NonOrthonormal: return "NonOrthonormal";
        case ErrorCode::AdmissibilityViolation: return "AdmissibilityViolation";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularDirection:
        case ErrorCode::NotPD:
        case ErrorCode::NonFiniteGaps:
        case ErrorCode::Unbounded:
        case ErrorCode::DomainError:
            return true;
        default:
            return false;
    }
}

}  // namespace banditlab
