#pragma once

// Dense complex linear algebra and quantum-state primitives shared by every
// other module. Units: hbar = 1.

#include <complex>

#include <Eigen/Dense>

namespace zenolab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest |h(i,j) - conj(h(j,i))| over all entries.
double hermiticity_error(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

/// Throws NonHermitianInput unless `h` is square and Hermitian within
/// operator_tol * max(1, max|h_ij|).
void require_hermitian(const ComplexMatrix& h);

/// Throws NotNormalized unless | ||u|| - 1 | <= state_tol.
void require_normalized(const StateVector& u);

StateVector basis_state(Eigen::Index dim, Eigen::Index k);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
StateVector kron(const StateVector& a, const StateVector& b);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// Eigendecomposition H = Q diag(E) Q^dagger of a Hermitian matrix. Holding on
// to it makes repeated propagator evaluations (time sweeps) cheap.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const ComplexMatrix& h);

    const RealVector& energies() const { return energies_; }
    const ComplexMatrix& eigenvectors() const { return vectors_; }
    Eigen::Index dim() const { return energies_.size(); }

    /// U(t) = Q exp(-i E t) Q^dagger.
    ComplexMatrix propagator(double t) const;

    /// <u| U(t) |u> without forming U.
    Complex return_amplitude(const StateVector& u, double t) const;

    /// U(t) |u> without forming U.
    StateVector evolve(const StateVector& u, double t) const;

private:
    RealVector energies_;
    ComplexMatrix vectors_;
};

/// exp(-i h t) for Hermitian h via eigendecomposition.
ComplexMatrix herm_propagator(const ComplexMatrix& h, double t);

// A validated density matrix: Hermitian, unit trace, positive semidefinite
// up to the positivity slack.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(Eigen::Index dim);
    static DensityMatrix diagonal(const RealVector& populations);

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    RealVector populations() const { return m_.diagonal().real(); }
    double purity() const;
    double min_eigenvalue() const;

    /// Largest off-diagonal magnitude.
    double max_coherence() const;

private:
    ComplexMatrix m_;
};

/// Tr(rho A) for Hermitian A. The imaginary part is checked against the
/// operator tolerance and dropped.
double expectation(const DensityMatrix& rho, const ComplexMatrix& a);

enum class Subsystem { A, B };

/// Reduced state of a bipartite density matrix on C^dA (x) C^dB, joint index
/// a * dB + b.
DensityMatrix partial_trace(const DensityMatrix& joint, Eigen::Index dim_a, Eigen::Index dim_b,
                            Subsystem keep);

}  // namespace zenolab
