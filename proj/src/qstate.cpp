#include "zenolab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zenolab/errors.hpp"
#include "zenolab/numeric_policy.hpp"

namespace zenolab {

NumericPolicy& numeric_policy()
{
    static NumericPolicy policy;
    return policy;
}

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::NonOrthonormalBasis: return "NonOrthonormalBasis";
    case ErrorCode::EnvironmentTooSmall: return "EnvironmentTooSmall";
    case ErrorCode::NotDiagonal: return "NotDiagonal";
    case ErrorCode::UnnormalizedProfile: return "UnnormalizedProfile";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::ZeroGamma: return "ZeroGamma";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::NonHermitianDrift: return "NonHermitianDrift";
    case ErrorCode::InvalidRateMatrix: return "InvalidRateMatrix";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

double hermiticity_error(const ComplexMatrix& m)
{
    if (m.rows() != m.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m)
{
    return m.allFinite();
}

void require_hermitian(const ComplexMatrix& h)
{
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "Hamiltonian must be square and non-empty");
    }
    if (!h.allFinite()) {
        throw Error(ErrorCode::NonHermitianInput, "matrix has non-finite entries");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double err = hermiticity_error(h);
    if (err > numeric_policy().operator_tol * scale) {
        std::ostringstream msg;
        msg << "asymmetry " << err << " exceeds tolerance";
        throw Error(ErrorCode::NonHermitianInput, msg.str());
    }
}

void require_normalized(const StateVector& u)
{
    if (u.size() == 0 || std::abs(u.norm() - 1.0) > numeric_policy().state_tol) {
        throw Error(ErrorCode::NotNormalized, "state vector must have unit norm");
    }
}

StateVector basis_state(Eigen::Index dim, Eigen::Index k)
{
    if (k < 0 || k >= dim) {
        throw Error(ErrorCode::DimensionMismatch, "basis index out of range");
    }
    StateVector v = StateVector::Zero(dim);
    v(k) = 1.0;
    return v;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

StateVector kron(const StateVector& a, const StateVector& b)
{
    StateVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

ComplexMatrix pauli_x()
{
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

ComplexMatrix pauli_y()
{
    ComplexMatrix m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return m;
}

ComplexMatrix pauli_z()
{
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

SpectralDecomposition::SpectralDecomposition(const ComplexMatrix& h)
{
    require_hermitian(h);
    if (static_cast<std::size_t>(h.rows()) > numeric_policy().max_dim) {
        throw Error(ErrorCode::DimensionMismatch, "dimension exceeds configured maximum");
    }
    const ComplexMatrix symmetric = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetric);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailure, "Hermitian eigensolver did not converge");
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

ComplexMatrix SpectralDecomposition::propagator(double t) const
{
    StateVector phases(energies_.size());
    for (Eigen::Index k = 0; k < energies_.size(); ++k) {
        phases(k) = std::exp(-kI * (energies_(k) * t));
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Complex SpectralDecomposition::return_amplitude(const StateVector& u, double t) const
{
    if (u.size() != dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state and Hamiltonian dimensions differ");
    }
    const StateVector overlaps = vectors_.adjoint() * u;
    Complex amp = 0.0;
    for (Eigen::Index k = 0; k < dim(); ++k) {
        amp += std::norm(overlaps(k)) * std::exp(-kI * (energies_(k) * t));
    }
    return amp;
}

StateVector SpectralDecomposition::evolve(const StateVector& u, double t) const
{
    if (u.size() != dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state and Hamiltonian dimensions differ");
    }
    StateVector overlaps = vectors_.adjoint() * u;
    for (Eigen::Index k = 0; k < dim(); ++k) {
        overlaps(k) *= std::exp(-kI * (energies_(k) * t));
    }
    return vectors_ * overlaps;
}

ComplexMatrix herm_propagator(const ComplexMatrix& h, double t)
{
    return SpectralDecomposition(h).propagator(t);
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m))
{
    const auto& policy = numeric_policy();
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix must be square and non-empty");
    }
    if (!m_.allFinite()) {
        throw Error(ErrorCode::InvalidDensityMatrix, "non-finite entries");
    }
    if (hermiticity_error(m_) > policy.state_tol) {
        throw Error(ErrorCode::InvalidDensityMatrix, "not Hermitian");
    }
    if (std::abs(m_.trace() - Complex(1.0)) > policy.state_tol) {
        throw Error(ErrorCode::InvalidDensityMatrix, "trace differs from one");
    }
    if (min_eigenvalue() < -policy.positivity_slack) {
        throw Error(ErrorCode::InvalidDensityMatrix, "negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi)
{
    require_normalized(psi);
    return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim)
{
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::diagonal(const RealVector& populations)
{
    return DensityMatrix(populations.cast<Complex>().asDiagonal().toDenseMatrix());
}

double DensityMatrix::purity() const
{
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return m_.cwiseAbs2().sum();
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m_ + m_.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailure, "eigenvalues of density matrix");
    }
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::max_coherence() const
{
    double best = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i) {
        for (Eigen::Index j = 0; j < dim(); ++j) {
            if (i != j) {
                best = std::max(best, std::abs(m_(i, j)));
            }
        }
    }
    return best;
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& a)
{
    if (a.rows() != rho.dim() || a.cols() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
    }
    require_hermitian(a);
    const Complex value = (rho.matrix() * a).trace();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (std::abs(value.imag()) > numeric_policy().operator_tol * scale) {
        throw Error(ErrorCode::NonHermitianInput, "expectation value has an imaginary part");
    }
    return value.real();
}

DensityMatrix partial_trace(const DensityMatrix& joint, Eigen::Index dim_a, Eigen::Index dim_b,
                            Subsystem keep)
{
    if (dim_a <= 0 || dim_b <= 0 || joint.dim() != dim_a * dim_b) {
        throw Error(ErrorCode::DimensionMismatch, "joint dimension is not dA * dB");
    }
    const ComplexMatrix& m = joint.matrix();
    if (keep == Subsystem::A) {
        ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
        for (Eigen::Index a1 = 0; a1 < dim_a; ++a1) {
            for (Eigen::Index a2 = 0; a2 < dim_a; ++a2) {
                Complex sum = 0.0;
                for (Eigen::Index b = 0; b < dim_b; ++b) {
                    sum += m(a1 * dim_b + b, a2 * dim_b + b);
                }
                out(a1, a2) = sum;
            }
        }
        return DensityMatrix(std::move(out));
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
    for (Eigen::Index b1 = 0; b1 < dim_b; ++b1) {
        for (Eigen::Index b2 = 0; b2 < dim_b; ++b2) {
            Complex sum = 0.0;
            for (Eigen::Index a = 0; a < dim_a; ++a) {
                sum += m(a * dim_b + b1, a * dim_b + b2);
            }
            out(b1, b2) = sum;
        }
    }
    return DensityMatrix(std::move(out));
}

}  // namespace zenolab
