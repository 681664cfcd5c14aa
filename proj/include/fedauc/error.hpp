#pragma once

#include <stdexcept>
#include <string>

namespace fedauc {

// Bad numeric input (non-finite score, malformed label, empty vectors).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// epsilon/delta/alpha/beta outside their admissible ranges.
struct InvalidBudgetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// AUC undefined: all labels identical (P == 0 or N == 0).
struct DegenerateLabelsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rho_plus + rho_minus >= 1 makes the debias transform singular.
struct SingularRatesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Estimated base rate fell outside (0,1).
struct DegenerateBaseRateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A protocol step ran without all clients having reported.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedauc
