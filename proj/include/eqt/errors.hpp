#pragma once

#include <stdexcept>
#include <string>

namespace eqt {

/// Raised when an input fails a numerical validity check (Hermiticity,
/// idempotency, normalization...). Carries the measured residual.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(const std::string& what, double residual)
        : std::invalid_argument(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace eqt
