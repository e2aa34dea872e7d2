#pragma once

// Classical rate equations dP/dt = A P for a generator A (off-diagonal
// entries are rates, columns sum to zero), the Pauli equation for the
// diagonal of a density matrix, and its contrast with the von Neumann
// equation on the same diagonal state.

#include <vector>

#include "zenolab/hamiltonian.hpp"
#include "zenolab/errors.hpp"
#include "zenolab/io.hpp"

namespace zenolab::ratekin {

class RateMatrix {
public:
    explicit RateMatrix(RealMatrix a);

    /// Two states with a single decay channel 1 -> 2 at rate gamma.
    static RateMatrix decay(double gamma);

    Eigen::Index dim() const { return a_.rows(); }
    const RealMatrix& matrix() const { return a_; }

private:
    RealMatrix a_;
};

/// {"dim": d, "rates": [[row, col, value], ...]}; diagonal entries must be
/// given explicitly and are validated, not inferred.
RateMatrix rate_matrix_from_json(const json& j);
json to_json(const RateMatrix& a);

class ProbabilityVector {
public:
    explicit ProbabilityVector(RealVector p);

    Eigen::Index dim() const { return p_.size(); }
    const RealVector& values() const { return p_; }
    double operator[](Eigen::Index i) const { return p_(i); }

private:
    RealVector p_;
};

struct SolveReport {
    double min_raw_component = 0.0;  // before clamping
    bool clamped = false;
};

/// exp(A t) via uniformization and repeated squaring, which keeps every
/// intermediate matrix entrywise non-negative.
RealMatrix transition_matrix(const RateMatrix& a, double t);

ProbabilityVector solve_rate_equation(const RateMatrix& a, const ProbabilityVector& p0, double t,
                                      SolveReport* report = nullptr);

/// A applied to the populations of rho; coherences are ignored.
RealVector pauli_equation_step(const RateMatrix& a, const DensityMatrix& rho);

struct FreezeReport {
    std::vector<double> von_neumann_rates;
    std::vector<double> pauli_rates;
    std::vector<double> unitary_populations;  // diag(U rho U^dagger) at t
    std::vector<double> pauli_populations;    // rate-equation solution at t
};

FreezeReport freeze_contrast(const Hamiltonian& h, const RateMatrix& a,
                             const DensityMatrix& rho_diag, double t);
json to_json(const FreezeReport& report);

/// `t,p_0,...,p_{d-1}`
CsvTable rate_table(Eigen::Index dim);
void append_rate_row(CsvTable& table, double t, const ProbabilityVector& p);

}  // namespace zenolab::ratekin
