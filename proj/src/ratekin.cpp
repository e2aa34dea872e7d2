#include "zenolab/ratekin.hpp"

#include <algorithm>
#include <cmath>

#include "zenolab/vnmeasure.hpp"

namespace zenolab::ratekin {

namespace {

constexpr double kColumnSumTol = 1e-12;
constexpr double kNegativeTol = 1e-12;

}  // namespace

RateMatrix::RateMatrix(RealMatrix a) : a_(std::move(a))
{
    if (a_.rows() == 0 || a_.rows() != a_.cols()) {
        throw Error(ErrorCode::InvalidRateMatrix, "rate matrix must be square and non-empty");
    }
    if (!a_.allFinite()) {
        throw Error(ErrorCode::InvalidRateMatrix, "rate matrix has non-finite entries");
    }
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < a_.cols(); ++j) {
        for (Eigen::Index i = 0; i < a_.rows(); ++i) {
            if (i != j && a_(i, j) < 0.0) {
                throw Error(ErrorCode::InvalidRateMatrix, "negative off-diagonal rate");
            }
        }
        if (std::abs(a_.col(j).sum()) > kColumnSumTol * scale) {
            throw Error(ErrorCode::InvalidRateMatrix, "column does not sum to zero");
        }
    }
}

RateMatrix RateMatrix::decay(double gamma)
{
    if (!(gamma >= 0.0)) {
        throw Error(ErrorCode::InvalidRateMatrix, "decay rate must be non-negative");
    }
    RealMatrix a(2, 2);
    a << -gamma, 0.0, gamma, 0.0;
    return RateMatrix(std::move(a));
}

RateMatrix rate_matrix_from_json(const json& j)
{
    try {
        const auto dim = j.at("dim").get<long long>();
        if (dim < 1) {
            throw Error(ErrorCode::InvalidRateMatrix, "dim must be positive");
        }
        RealMatrix a = RealMatrix::Zero(dim, dim);
        for (const auto& triple : j.at("rates")) {
            if (!triple.is_array() || triple.size() != 3) {
                throw Error(ErrorCode::InvalidRateMatrix, "rates entries must be [row, col, value]");
            }
            const auto row = triple[0].get<long long>();
            const auto col = triple[1].get<long long>();
            if (row < 0 || row >= dim || col < 0 || col >= dim) {
                throw Error(ErrorCode::InvalidRateMatrix, "rate index out of range");
            }
            a(row, col) = triple[2].get<double>();
        }
        return RateMatrix(std::move(a));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidRateMatrix, std::string("rate file: ") + e.what());
    }
}

json to_json(const RateMatrix& a)
{
    json rates = json::array();
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        for (Eigen::Index j = 0; j < a.dim(); ++j) {
            if (a.matrix()(i, j) != 0.0) rates.push_back({i, j, a.matrix()(i, j)});
        }
    }
    return json{{"dim", a.dim()}, {"rates", rates}};
}

ProbabilityVector::ProbabilityVector(RealVector p) : p_(std::move(p))
{
    if (p_.size() == 0 || !p_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "probability vector must be finite and non-empty");
    }
    if (p_.minCoeff() < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "probabilities must be non-negative");
    }
    if (std::abs(p_.sum() - 1.0) > 1e-10) {
        throw Error(ErrorCode::NotNormalized, "probabilities must sum to 1");
    }
}

RealMatrix transition_matrix(const RateMatrix& a, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "time must be finite and non-negative");
    }
    const Eigen::Index d = a.dim();
    const double q = (-a.matrix().diagonal()).maxCoeff();
    if (q <= 0.0 || t == 0.0) {
        return RealMatrix::Identity(d, d);
    }
    // exp(A tau) = e^{-q tau} sum_k (q tau)^k / k! M^k with M = I + A/q >= 0.
    int squarings = 0;
    double tau = t;
    while (q * tau > 0.5) {
        tau *= 0.5;
        ++squarings;
    }
    const RealMatrix m = RealMatrix::Identity(d, d) + a.matrix() / q;
    const double x = q * tau;
    RealMatrix term = RealMatrix::Identity(d, d);
    RealMatrix sum = term;
    double coeff = 1.0;
    for (int k = 1; k < 60; ++k) {
        term = (m * term).eval();
        coeff *= x / k;
        sum += coeff * term;
        if (coeff < 1e-18) break;
    }
    RealMatrix p = std::exp(-x) * sum;
    for (int s = 0; s < squarings; ++s) {
        p = (p * p).eval();
    }
    return p;
}

ProbabilityVector solve_rate_equation(const RateMatrix& a, const ProbabilityVector& p0, double t,
                                      SolveReport* report)
{
    if (a.dim() != p0.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "rate matrix and probability vector differ in size");
    }
    RealVector p = transition_matrix(a, t) * p0.values();
    SolveReport rep;
    rep.min_raw_component = p.minCoeff();
    if (rep.min_raw_component < -kNegativeTol) {
        throw Error(ErrorCode::InvalidRateMatrix, "rate equation produced a negative probability");
    }
    if (rep.min_raw_component < 0.0) {
        p = p.cwiseMax(0.0);
        rep.clamped = true;
    }
    p /= p.sum();
    if (report) *report = rep;
    return ProbabilityVector(std::move(p));
}

RealVector pauli_equation_step(const RateMatrix& a, const DensityMatrix& rho)
{
    if (a.dim() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "rate matrix and density matrix differ in size");
    }
    return a.matrix() * rho.populations();
}

FreezeReport freeze_contrast(const Hamiltonian& h, const RateMatrix& a,
                             const DensityMatrix& rho_diag, double t)
{
    if (h.dim() != rho_diag.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "Hamiltonian and density matrix differ in size");
    }
    FreezeReport report;
    report.von_neumann_rates = vnmeasure::diagonal_freeze_rate(rho_diag, h);
    const RealVector pauli = pauli_equation_step(a, rho_diag);
    report.pauli_rates.assign(pauli.begin(), pauli.end());

    const ComplexMatrix u = herm_propagator(h.matrix(), t);
    const ComplexMatrix evolved = u * rho_diag.matrix() * u.adjoint();
    for (Eigen::Index i = 0; i < evolved.rows(); ++i) {
        report.unitary_populations.push_back(evolved(i, i).real());
    }
    const ProbabilityVector p = solve_rate_equation(
        a, ProbabilityVector(rho_diag.populations().cwiseMax(0.0)), t);
    report.pauli_populations.assign(p.values().begin(), p.values().end());
    return report;
}

json to_json(const FreezeReport& report)
{
    return json{{"von_neumann_rates", report.von_neumann_rates},
                {"pauli_rates", report.pauli_rates},
                {"unitary_populations", report.unitary_populations},
                {"pauli_populations", report.pauli_populations}};
}

CsvTable rate_table(Eigen::Index dim)
{
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 0; i < dim; ++i) header.push_back("p_" + std::to_string(i));
    return CsvTable(std::move(header));
}

void append_rate_row(CsvTable& table, double t, const ProbabilityVector& p)
{
    std::vector<double> row{t};
    row.insert(row.end(), p.values().begin(), p.values().end());
    table.add_row(row);
}

}  // namespace zenolab::ratekin
