#pragma once

#include <stdexcept>
#include <string>

namespace banditlab {

enum class ErrorCode {
    NormViolation,
    RankDeficient,
    DuplicateArm,
    NonUniqueOptimum,
    MeanOutOfRange,
    LengthMismatch,
    SingularDirection,
    NotPD,
    EmptySamples,
    BadBounds,
    EmptySubset,
    NonFiniteGaps,
    Unbounded,
    NonOrthonormal,
    AdmissibilityViolation,
    DomainError,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

// Numerical failures map to exit code 3; everything else is a configuration
// or usage problem.
bool is_numerical(ErrorCode code);

class BanditError : public std::runtime_error {
public:
    BanditError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace banditlab
