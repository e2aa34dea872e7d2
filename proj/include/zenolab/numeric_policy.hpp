#pragma once

#include <cstddef>

namespace zenolab {

// Process-wide tolerances. Adjust before starting any concurrent work; the
// object is read without synchronization.
struct NumericPolicy {
    double state_tol = 1e-12;          // norms, traces, Hermiticity of states
    double operator_tol = 1e-10;       // Hermiticity of inputs, unitarity
    double positivity_slack = 1e-10;   // smallest admissible eigenvalue is -slack
    std::size_t max_dim = 4096;
};

NumericPolicy& numeric_policy();

}  // namespace zenolab
