#include "zenolab/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace zenolab::spatial {

namespace {

using std::numbers::pi;

void require_grid(int n, double length, double mass)
{
    if (n < 16 || n % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "grid size must be even and at least 16");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw Error(ErrorCode::InvalidArgument, "grid length must be positive");
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw Error(ErrorCode::InvalidArgument, "mass must be positive");
    }
}

// Fourier-spectral differentiation matrices on n periodic points (n even).
RealMatrix spectral_d1(int n, double length)
{
    const double h = 2.0 * pi / n;
    const double scale = 2.0 * pi / length;
    RealMatrix d = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int k = i - j;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            d(i, j) = 0.5 * sign / std::tan(0.5 * k * h) * scale;
        }
    }
    return d;
}

RealMatrix spectral_d2(int n, double length)
{
    const double h = 2.0 * pi / n;
    const double scale = 2.0 * pi / length;
    RealMatrix d(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                d(i, j) = (-pi * pi / (3.0 * h * h) - 1.0 / 6.0) * scale * scale;
                continue;
            }
            const int k = i - j;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double s = std::sin(0.5 * k * h);
            d(i, j) = -0.5 * sign / (s * s) * scale * scale;
        }
    }
    return d;
}

// Minimum-image separation x_i - x_j. At the exact half-period tie the
// signed separation is ambiguous; it is set to zero so the matrix stays
// antisymmetric, while its square keeps the value (L/2)^2.
void separation_matrices(int n, double length, RealMatrix& r, RealMatrix& r2)
{
    const double dx = length / n;
    r.resize(n, n);
    r2.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int k = i - j;
            if (k > n / 2) k -= n;
            if (k < -n / 2) k += n;
            const double d = k * dx;
            r2(i, j) = d * d;
            r(i, j) = (std::abs(k) == n / 2) ? 0.0 : d;
        }
    }
}

struct Operators {
    RealMatrix d1, d2, r, r2;

    Operators(int n, double length) : d1(spectral_d1(n, length)), d2(spectral_d2(n, length))
    {
        separation_matrices(n, length, r, r2);
    }
};

// Right-hand side on the split representation rho = a + i b.
void rhs(const Operators& ops, const MasterEquationSpec& spec, double mass, const RealMatrix& a,
         const RealMatrix& b, RealMatrix& da, RealMatrix& db)
{
    da = -spec.lambda * ops.r2.cwiseProduct(a);
    db = -spec.lambda * ops.r2.cwiseProduct(b);
    if (spec.include_kinetic) {
        // -i/(2m) (rho D2 - D2 rho)
        const RealMatrix cr = a * ops.d2 - ops.d2 * a;
        const RealMatrix ci = b * ops.d2 - ops.d2 * b;
        da += ci / (2.0 * mass);
        db -= cr / (2.0 * mass);
    }
    if (spec.gamma_friction != 0.0) {
        // (gamma/2) r o (rho D1^T - D1 rho), D1^T = -D1
        const RealMatrix gr = -(a * ops.d1 + ops.d1 * a);
        const RealMatrix gi = -(b * ops.d1 + ops.d1 * b);
        da += 0.5 * spec.gamma_friction * ops.r.cwiseProduct(gr);
        db += 0.5 * spec.gamma_friction * ops.r.cwiseProduct(gi);
    }
}

void validate_spec(const MasterEquationSpec& spec)
{
    if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
        throw Error(ErrorCode::InvalidArgument, "localization rate must be non-negative");
    }
    if (!(spec.gamma_friction >= 0.0) || !std::isfinite(spec.gamma_friction)) {
        throw Error(ErrorCode::InvalidArgument, "friction rate must be non-negative");
    }
}

class Integrator {
public:
    Integrator(const GridState& gs, const MasterEquationSpec& spec)
        : ops_(gs.n, gs.length), spec_(spec), mass_(gs.mass), a_(gs.rho.real()), b_(gs.rho.imag())
    {
        bound_ = 10.0 * std::max(a_.cwiseAbs().maxCoeff(), b_.cwiseAbs().maxCoeff());
    }

    void advance(double t, double dt)
    {
        if (t <= 0.0) return;
        const auto steps = static_cast<long>(std::ceil(t / dt - 1e-12));
        const double h = t / static_cast<double>(std::max(1L, steps));
        for (long s = 0; s < std::max(1L, steps); ++s) {
            step(h);
            check_growth();
        }
    }

    ComplexMatrix rho() const
    {
        ComplexMatrix out(a_.rows(), a_.cols());
        out.real() = a_;
        out.imag() = b_;
        return out;
    }

private:
    void step(double h)
    {
        rhs(ops_, spec_, mass_, a_, b_, k1a_, k1b_);
        rhs(ops_, spec_, mass_, a_ + 0.5 * h * k1a_, b_ + 0.5 * h * k1b_, k2a_, k2b_);
        rhs(ops_, spec_, mass_, a_ + 0.5 * h * k2a_, b_ + 0.5 * h * k2b_, k3a_, k3b_);
        rhs(ops_, spec_, mass_, a_ + h * k3a_, b_ + h * k3b_, k4a_, k4b_);
        a_ += (h / 6.0) * (k1a_ + 2.0 * k2a_ + 2.0 * k3a_ + k4a_);
        b_ += (h / 6.0) * (k1b_ + 2.0 * k2b_ + 2.0 * k3b_ + k4b_);
    }

    void check_growth() const
    {
        const double m = std::max(a_.cwiseAbs().maxCoeff(), b_.cwiseAbs().maxCoeff());
        if (!std::isfinite(m) || m > bound_) {
            throw Error(ErrorCode::UnstableStep,
                        "density matrix grew beyond 10x its initial magnitude; reduce the time step");
        }
    }

    Operators ops_;
    MasterEquationSpec spec_;
    double mass_;
    RealMatrix a_, b_;
    RealMatrix k1a_, k1b_, k2a_, k2b_, k3a_, k3b_, k4a_, k4b_;
    double bound_ = 0.0;
};

GridState finish(const GridState& initial, ComplexMatrix rho)
{
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if (hermiticity_error(rho) > 1e-8 * scale) {
        throw Error(ErrorCode::NonHermitianDrift, "evolved density matrix lost Hermiticity");
    }
    GridState out = initial;
    out.rho = std::move(rho);
    return out;
}

}  // namespace

double GridState::trace() const
{
    return rho.diagonal().real().sum() * dx();
}

double GridState::purity() const
{
    return rho.cwiseAbs2().sum() * dx() * dx();
}

void GridState::validate() const
{
    require_grid(n, length, mass);
    if (rho.rows() != n || rho.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix does not match the grid size");
    }
    if (!all_finite(rho)) {
        throw Error(ErrorCode::InvalidDensityMatrix, "density matrix has non-finite entries");
    }
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if (hermiticity_error(rho) > 1e-10 * scale) {
        throw Error(ErrorCode::NonHermitianInput, "grid density matrix is not Hermitian");
    }
    if (std::abs(trace() - 1.0) > 1e-8) {
        throw Error(ErrorCode::NotNormalized, "grid density matrix trace differs from 1");
    }
}

GridState GridState::gaussian_packet(int n, double length, double mass, double x0, double p0,
                                     double width)
{
    require_grid(n, length, mass);
    if (!(width > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "packet width must be positive");
    }
    GridState gs;
    gs.n = n;
    gs.length = length;
    gs.mass = mass;
    StateVector psi(n);
    for (int i = 0; i < n; ++i) {
        const double x = gs.x(i);
        const double g = std::exp(-(x - x0) * (x - x0) / (4.0 * width * width));
        psi(i) = g * std::exp(kI * (p0 * x));
    }
    // Normalize on the grid so the discrete trace is exactly 1.
    psi /= std::sqrt(psi.squaredNorm() * gs.dx());
    gs.rho = psi * psi.adjoint();
    return gs;
}

MasterEquationSpec MasterEquationSpec::from_bath(double mass, double gamma, double k_b_t)
{
    if (!(mass > 0.0) || !(gamma >= 0.0) || !(k_b_t >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bath parameters must be non-negative");
    }
    MasterEquationSpec spec;
    spec.gamma_friction = gamma;
    spec.lambda = mass * gamma * k_b_t;
    return spec;
}

Moments moments(const GridState& gs)
{
    const int n = gs.n;
    const double dx = gs.dx();
    const RealMatrix d1 = spectral_d1(n, gs.length);
    const RealMatrix d2 = spectral_d2(n, gs.length);
    Moments m;
    for (int i = 0; i < n; ++i) {
        const double pii = gs.rho(i, i).real();
        m.x_mean += gs.x(i) * pii * dx;
        m.x2 += gs.x(i) * gs.x(i) * pii * dx;
    }
    // Tr(P rho) with P = -i D1 and Tr(-D2 rho); D1 real antisymmetric.
    double p = 0.0;
    double p2 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            p += d1(i, j) * gs.rho(j, i).imag();
            p2 -= d2(i, j) * gs.rho(j, i).real();
        }
    }
    m.p_mean = p * dx;
    m.p2 = p2 * dx;
    return m;
}

double max_stable_step(const GridState& gs, const MasterEquationSpec& spec)
{
    const double k_max = pi / gs.dx();
    const double r_max = 0.5 * gs.length;
    double rate = spec.lambda * r_max * r_max + spec.gamma_friction * r_max * k_max;
    if (spec.include_kinetic) rate += k_max * k_max / (2.0 * gs.mass);
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 2.5 / rate;
}

GridState evolve_master(const GridState& gs, const MasterEquationSpec& spec, double t, double dt)
{
    gs.validate();
    validate_spec(spec);
    if (!(t >= 0.0) || !(dt > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "evolution time must be >= 0 and step > 0");
    }
    Integrator integ(gs, spec);
    integ.advance(t, dt);
    return finish(gs, integ.rho());
}

Trajectory evolve_trajectory(const GridState& gs, const MasterEquationSpec& spec, double t,
                             double dt, int samples)
{
    gs.validate();
    validate_spec(spec);
    if (!(t >= 0.0) || !(dt > 0.0) || samples < 1) {
        throw Error(ErrorCode::InvalidArgument, "invalid trajectory time, step or sample count");
    }
    auto record = [](double time, const GridState& s) {
        return TrajectoryPoint{time, moments(s), s.trace(), s.purity()};
    };
    Trajectory traj;
    traj.points.push_back(record(0.0, gs));
    Integrator integ(gs, spec);
    const double seg = t / samples;
    GridState current = gs;
    for (int k = 1; k <= samples; ++k) {
        integ.advance(seg, dt);
        current.rho = integ.rho();
        traj.points.push_back(record(seg * k, current));
    }
    traj.final_state = finish(gs, integ.rho());
    return traj;
}

CsvTable trajectory_table(const Trajectory& traj)
{
    CsvTable table({"t", "x_mean", "p_mean", "x2", "p2", "trace", "purity"});
    for (const auto& pt : traj.points) {
        table.add_row(std::vector<double>{pt.t, pt.m.x_mean, pt.m.p_mean, pt.m.x2, pt.m.p2,
                                          pt.trace, pt.purity});
    }
    return table;
}

CsvTable snapshot_table(const GridState& gs)
{
    CsvTable table({"x", "xp", "re", "im"});
    for (int i = 0; i < gs.n; ++i) {
        for (int j = 0; j < gs.n; ++j) {
            table.add_row(
                std::vector<double>{gs.x(i), gs.x(j), gs.rho(i, j).real(), gs.rho(i, j).imag()});
        }
    }
    return table;
}

double localization_rate(const EnvironmentSpec& env)
{
    if (!(env.k >= 0.0) || !(env.flux >= 0.0) || !(env.sigma_eff >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "environment parameters must be non-negative");
    }
    return env.k * env.k * env.flux * env.sigma_eff;
}

DecoherenceTimescales decoherence_timescales(const EnvironmentSpec& env, double separation)
{
    if (!(separation > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "separation must be positive");
    }
    DecoherenceTimescales ts;
    ts.lambda = localization_rate(env);
    const double inf = std::numeric_limits<double>::infinity();
    ts.t_dec_small = ts.lambda > 0.0 ? 1.0 / (ts.lambda * separation * separation) : inf;
    ts.t_dec_single = ts.lambda > 0.0 ? env.k * env.k / ts.lambda : inf;
    ts.regime = env.k * separation < 1.0 ? ScatteringRegime::ManyScatterings
                                         : ScatteringRegime::SingleScattering;
    return ts;
}

RatioResult decoherence_relaxation_ratio(const MacroscopicBody& body)
{
    if (!(body.mass_si > 0.0) || !(body.temperature > 0.0) || !(body.delta_x > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "mass, temperature and separation must be positive");
    }
    const double mkt = body.mass_si * si::k_boltzmann * body.temperature;
    RatioResult r;
    r.ratio = mkt * body.delta_x * body.delta_x / (si::hbar * si::hbar);
    r.thermal_wavelength = si::hbar / std::sqrt(mkt);
    return r;
}

std::vector<EnvironmentRecord> environments_from_json(const json& j)
{
    std::vector<EnvironmentRecord> out;
    try {
        for (const auto& env : j.at("environments")) {
            const std::string name = env.at("name").get<std::string>();
            const double k = env.at("k").get<double>();
            const double flux = env.at("flux").get<double>();
            for (const auto& sz : env.at("sizes")) {
                EnvironmentRecord rec;
                rec.environment = name;
                rec.size = sz.at("a").get<double>();
                rec.spec = EnvironmentSpec{k, flux, sz.at("sigma_eff").get<double>()};
                out.push_back(rec);
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("environments file: ") + e.what());
    }
    return out;
}

}  // namespace zenolab::spatial
