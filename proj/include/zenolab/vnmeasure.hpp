#pragma once

// Measurement as a dynamical process: dephasing channels, the two-step
// amplitude chain with and without an intermediate measurement, ideal von
// Neumann entanglement with pointer states, and the stationarity of
// diagonal density matrices under the von Neumann equation.

#include <array>
#include <optional>
#include <vector>

#include "zenolab/errors.hpp"
#include "zenolab/hamiltonian.hpp"
#include "zenolab/io.hpp"

namespace zenolab::vnmeasure {

// Multiplies coherences in `basis` by (1 - strength). The basis is given as
// the columns of a unitary matrix; no basis means the computational one.
class DephasingChannel {
public:
    explicit DephasingChannel(double strength, std::optional<ComplexMatrix> basis = std::nullopt);

    double strength() const { return strength_; }
    const std::optional<ComplexMatrix>& basis() const { return basis_; }

private:
    double strength_;
    std::optional<ComplexMatrix> basis_;
};

DensityMatrix apply_dephasing(const DensityMatrix& rho, const DephasingChannel& channel);

struct ChainResult {
    double p2_coherent = 0.0;
    double p2_measured = 0.0;
    // amplitudes[i][j] = <j+1| U(t) |i+1>, i.e. a_ij for the transition i -> j.
    std::array<std::array<Complex, 2>, 2> amplitudes{};
};

json to_json(const ChainResult& result);

/// Two steps of length t from |1> under H = V(|1><2| + |2><1|) + E|2><2|.
/// The measured branch applies a complete dephasing between the steps.
ChainResult two_step_chain(double v, double e, double t);

/// Population of |2> after n equal steps covering t_total, with complete
/// dephasing between consecutive steps. n = 1 is the coherent result.
double n_step_measured_chain(double v, double e, double t_total, long long n);

struct EntangledMeasurement {
    DensityMatrix joint;
    DensityMatrix reduced;
};

/// Ideal measurement |n>|Phi_0> -> |n>|Phi_n>, realized by a controlled
/// cyclic shift of an n_env-level pointer with Phi_n the canonical basis.
EntangledMeasurement entangle_measurement(const StateVector& system, Eigen::Index n_env);

/// Same map with arbitrary normalized pointer states (columns of
/// `pointer_states`), which need not be orthogonal.
EntangledMeasurement entangle_with_pointers(const StateVector& system,
                                            const ComplexMatrix& pointer_states);

/// Two unit pointer vectors in C^2 with real overlap <Phi_1|Phi_2> = s.
ComplexMatrix pointer_pair_with_overlap(double s);

/// Diagonal of -i[H, rho] for a diagonal rho.
std::vector<double> diagonal_freeze_rate(const DensityMatrix& rho_diag, const Hamiltonian& h);

// Unitary record of repeated measurements: a pointer entangled with the
// system at every step stores each outcome. No projection is ever applied;
// statistics follow from reduced states.
struct RecordedChain {
    double p2 = 0.0;               // system population of |2> at t_total
    double p_never_found_2 = 0.0;  // history with no |2> outcome
    std::vector<double> count_distribution;  // by number of |2> outcomes
};

inline constexpr long long kMaxRecordedSteps = 20;

/// Unitary chain in which a pointer keeps the complete outcome history of n
/// measurements (2^n orthogonal records). Throws for n > kMaxRecordedSteps.
RecordedChain recorded_chain(double v, double e, double t_total, long long n);

CsvTable chain_sweep_table();
void append_chain_row(CsvTable& table, long long n, double p2_coherent, double p2_measured);

}  // namespace zenolab::vnmeasure
