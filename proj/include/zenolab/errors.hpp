#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zenolab {

enum class ErrorCode {
    InvalidArgument,
    NonHermitianInput,
    DecompositionFailure,
    DimensionMismatch,
    NotNormalized,
    InvalidDensityMatrix,
    NonOrthonormalBasis,
    EnvironmentTooSmall,
    NotDiagonal,
    UnnormalizedProfile,
    WindowTooShort,
    ZeroGamma,
    UnstableStep,
    NonHermitianDrift,
    InvalidRateMatrix,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// All module failures are reported through this type; the code identifies
// the contract that was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Numerical failures (as opposed to bad input) surface with a distinct
    // CLI exit status.
    bool is_numerical() const noexcept
    {
        return code_ == ErrorCode::DecompositionFailure || code_ == ErrorCode::UnstableStep ||
               code_ == ErrorCode::NonHermitianDrift;
    }

private:
    ErrorCode code_;
};

}  // namespace zenolab
