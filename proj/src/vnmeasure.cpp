#include "zenolab/vnmeasure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "zenolab/errors.hpp"
#include "zenolab/numeric_policy.hpp"

namespace zenolab::vnmeasure {

namespace {

constexpr double kDiagonalThreshold = 1e-14;

ComplexMatrix chain_propagator(double v, double e, double t)
{
    if (!(t >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "step time must be non-negative");
    }
    return herm_propagator(Hamiltonian::two_level(v, e).matrix(), t);
}

DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& u)
{
    ComplexMatrix next = u * rho.matrix() * u.adjoint();
    // Restore exact Hermiticity lost to round-off in the triple product.
    next = 0.5 * (next + next.adjoint()).eval();
    return DensityMatrix(std::move(next));
}

}  // namespace

DephasingChannel::DephasingChannel(double strength, std::optional<ComplexMatrix> basis)
    : strength_(strength), basis_(std::move(basis))
{
    if (!(strength >= 0.0 && strength <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "dephasing strength must lie in [0, 1]");
    }
    if (basis_) {
        const ComplexMatrix& b = *basis_;
        if (b.rows() != b.cols()) {
            throw Error(ErrorCode::NonOrthonormalBasis, "basis matrix must be square");
        }
        const double err =
            (b.adjoint() * b - ComplexMatrix::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff();
        if (err > numeric_policy().operator_tol) {
            throw Error(ErrorCode::NonOrthonormalBasis, "basis vectors are not orthonormal");
        }
    }
}

DensityMatrix apply_dephasing(const DensityMatrix& rho, const DephasingChannel& channel)
{
    if (channel.basis() && channel.basis()->rows() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "channel basis and state dimensions differ");
    }
    if (channel.strength() == 0.0) {
        return rho;
    }
    const double keep = 1.0 - channel.strength();
    ComplexMatrix m = channel.basis() ? ComplexMatrix(channel.basis()->adjoint() * rho.matrix() *
                                                      *channel.basis())
                                      : rho.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j) {
                m(i, j) = keep == 0.0 ? Complex(0.0) : m(i, j) * keep;
            }
        }
    }
    if (channel.basis()) {
        m = (*channel.basis() * m * channel.basis()->adjoint()).eval();
        m = 0.5 * (m + m.adjoint()).eval();
    }
    return DensityMatrix(std::move(m));
}

json to_json(const ChainResult& result)
{
    json amps = json::array();
    for (const auto& row : result.amplitudes) {
        json r = json::array();
        for (const Complex& a : row) {
            r.push_back({a.real(), a.imag()});
        }
        amps.push_back(std::move(r));
    }
    return {{"p2_coherent", result.p2_coherent},
            {"p2_measured", result.p2_measured},
            {"amplitudes", std::move(amps)}};
}

ChainResult two_step_chain(double v, double e, double t)
{
    const ComplexMatrix u = chain_propagator(v, e, t);
    ChainResult result;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            result.amplitudes[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = u(j, i);
        }
    }
    const auto& a = result.amplitudes;
    result.p2_coherent = std::min(1.0, std::norm(a[0][1] * a[1][1] + a[0][0] * a[0][1]));

    // Intermediate measurement as complete dephasing of the density matrix.
    const DephasingChannel measure(1.0);
    DensityMatrix rho = DensityMatrix::pure(basis_state(2, 0));
    rho = evolve(rho, u);
    rho = apply_dephasing(rho, measure);
    rho = evolve(rho, u);
    result.p2_measured = std::clamp(rho(1, 1).real(), 0.0, 1.0);
    return result;
}

double n_step_measured_chain(double v, double e, double t_total, long long n)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "step count must be >= 1");
    }
    const ComplexMatrix u = chain_propagator(v, e, t_total / static_cast<double>(n));
    const DephasingChannel measure(1.0);
    DensityMatrix rho = DensityMatrix::pure(basis_state(2, 0));
    for (long long step = 0; step < n; ++step) {
        if (step > 0) {
            rho = apply_dephasing(rho, measure);
        }
        rho = evolve(rho, u);
    }
    return std::clamp(rho(1, 1).real(), 0.0, 1.0);
}

EntangledMeasurement entangle_measurement(const StateVector& system, Eigen::Index n_env)
{
    require_normalized(system);
    const Eigen::Index d = system.size();
    if (n_env < d) {
        throw Error(ErrorCode::EnvironmentTooSmall,
                    "pointer needs at least as many levels as the system");
    }
    // Controlled shift: |n>|k> -> |n>|k + n mod n_env>.
    const Eigen::Index dim = d * n_env;
    ComplexMatrix interaction = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index k = 0; k < n_env; ++k) {
            interaction(n * n_env + (k + n) % n_env, n * n_env + k) = 1.0;
        }
    }
    const StateVector initial = kron(system, basis_state(n_env, 0));
    const StateVector joint_state = interaction * initial;
    DensityMatrix joint = DensityMatrix::pure(joint_state);
    DensityMatrix reduced = partial_trace(joint, d, n_env, Subsystem::A);
    return {std::move(joint), std::move(reduced)};
}

EntangledMeasurement entangle_with_pointers(const StateVector& system,
                                            const ComplexMatrix& pointer_states)
{
    require_normalized(system);
    const Eigen::Index d = system.size();
    if (pointer_states.cols() != d) {
        throw Error(ErrorCode::DimensionMismatch, "need one pointer state per system level");
    }
    const Eigen::Index n_env = pointer_states.rows();
    for (Eigen::Index n = 0; n < d; ++n) {
        require_normalized(pointer_states.col(n));
    }
    StateVector joint_state = StateVector::Zero(d * n_env);
    for (Eigen::Index n = 0; n < d; ++n) {
        joint_state.segment(n * n_env, n_env) = system(n) * pointer_states.col(n);
    }
    DensityMatrix joint = DensityMatrix::pure(joint_state);
    DensityMatrix reduced = partial_trace(joint, d, n_env, Subsystem::A);
    return {std::move(joint), std::move(reduced)};
}

ComplexMatrix pointer_pair_with_overlap(double s)
{
    if (!(std::abs(s) <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "overlap must lie in [-1, 1]");
    }
    ComplexMatrix phi(2, 2);
    phi << 1.0, s, 0.0, std::sqrt(1.0 - s * s);
    return phi;
}

std::vector<double> diagonal_freeze_rate(const DensityMatrix& rho_diag, const Hamiltonian& h)
{
    if (h.dim() != rho_diag.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "Hamiltonian and state dimensions differ");
    }
    if (rho_diag.max_coherence() > kDiagonalThreshold) {
        throw Error(ErrorCode::NotDiagonal, "density matrix has off-diagonal elements");
    }
    const ComplexMatrix& hm = h.matrix();
    const ComplexMatrix& rho = rho_diag.matrix();
    std::vector<double> rates(static_cast<std::size_t>(rho_diag.dim()));
    for (Eigen::Index n = 0; n < rho_diag.dim(); ++n) {
        Complex sum = 0.0;
        for (Eigen::Index k = 0; k < rho_diag.dim(); ++k) {
            sum += hm(n, k) * rho(k, n) - rho(n, k) * hm(k, n);
        }
        rates[static_cast<std::size_t>(n)] = (-kI * sum).real();
    }
    return rates;
}

RecordedChain recorded_chain(double v, double e, double t_total, long long n)
{
    if (n < 1 || n > kMaxRecordedSteps) {
        throw Error(ErrorCode::InvalidArgument, "recorded chain needs 1 <= n <= 20 steps");
    }
    const ComplexMatrix u = chain_propagator(v, e, t_total / static_cast<double>(n));
    // The pointer stores the full outcome history as a bit string (bit s set
    // when step s found |2>). Distinct histories are orthogonal pointer states.
    const std::size_t histories = std::size_t{1} << n;
    std::vector<Complex> a1(histories, Complex(0.0));
    std::vector<Complex> a2(histories, Complex(0.0));
    a1[0] = 1.0;
    for (long long step = 0; step < n; ++step) {
        const std::size_t live = std::size_t{1} << step;
        const std::size_t bit = std::size_t{1} << step;
        for (std::size_t h = 0; h < live; ++h) {
            const Complex b1 = u(0, 0) * a1[h] + u(0, 1) * a2[h];
            const Complex b2 = u(1, 0) * a1[h] + u(1, 1) * a2[h];
            a1[h] = b1;
            a2[h] = 0.0;
            a1[h | bit] = 0.0;
            a2[h | bit] = b2;
        }
    }
    RecordedChain out;
    out.count_distribution.assign(static_cast<std::size_t>(n) + 1, 0.0);
    double p2 = 0.0;
    for (std::size_t h = 0; h < histories; ++h) {
        const double w = std::norm(a1[h]) + std::norm(a2[h]);
        out.count_distribution[static_cast<std::size_t>(std::popcount(h))] += w;
        p2 += std::norm(a2[h]);
    }
    out.p2 = std::clamp(p2, 0.0, 1.0);
    out.p_never_found_2 = out.count_distribution[0];
    return out;
}

CsvTable chain_sweep_table()
{
    return CsvTable({"n", "p2_coherent", "p2_measured"});
}

void append_chain_row(CsvTable& table, long long n, double p2_coherent, double p2_measured)
{
    table.add_row({static_cast<double>(n), p2_coherent, p2_measured});
}

}  // namespace zenolab::vnmeasure
