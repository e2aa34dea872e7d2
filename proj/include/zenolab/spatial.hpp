#pragma once

// Position-space decoherence of a single particle on a periodic 1D grid
// (hbar = 1 inside the integrator) and the SI/cgs calculators for
// localization rates and the decoherence-to-relaxation ratio.
//
// Master equation integrated here:
//   d rho/dt = -i/(2m) (d^2/dx'^2 - d^2/dx^2) rho
//              - Lambda (x - x')^2 rho
//              + gamma/2 (x - x') (d/dx' - d/dx) rho

#include <string>
#include <vector>

#include "zenolab/errors.hpp"
#include "zenolab/io.hpp"

namespace zenolab::spatial {

namespace si {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
}  // namespace si

// rho(x_i, x_j) on x_i = -L/2 + i L/n, normalized so sum_i rho_ii dx = 1.
struct GridState {
    int n = 0;
    double length = 0.0;
    double mass = 1.0;
    ComplexMatrix rho;

    double dx() const { return length / n; }
    double x(int i) const { return -0.5 * length + i * dx(); }
    double trace() const;
    /// Tr(rho_op^2) with rho_op = rho dx.
    double purity() const;
    void validate() const;

    /// Pure Gaussian packet with position spread `width`, centred at x0 with
    /// mean momentum p0.
    static GridState gaussian_packet(int n, double length, double mass, double x0, double p0,
                                     double width);
};

struct MasterEquationSpec {
    double lambda = 0.0;          // localization rate
    double gamma_friction = 0.0;  // momentum damping rate
    bool include_kinetic = true;

    /// Caldeira-Leggett bath: Lambda = m gamma k_B T (model units).
    static MasterEquationSpec from_bath(double mass, double gamma, double k_b_t);
};

struct Moments {
    double x_mean = 0.0;
    double p_mean = 0.0;
    double x2 = 0.0;
    double p2 = 0.0;
};

/// <p> and <p^2> use the Fourier-spectral derivative at coincidence.
Moments moments(const GridState& gs);

/// Largest step for which the explicit RK4 scheme is stable:
/// dt <= c / (k_max^2/2m + Lambda r_max^2 + gamma r_max k_max), c = 2.5,
/// k_max = pi/dx, r_max = L/2. Kinetic-dominated this is dt <= (5/pi^2) m dx^2.
double max_stable_step(const GridState& gs, const MasterEquationSpec& spec);

/// Fixed-step RK4 over [0, t]. The step is shrunk so that an integer number
/// of steps covers t. Throws UnstableStep if |rho| grows past 10x its initial
/// maximum and NonHermitianDrift if the result is not Hermitian within 1e-8.
GridState evolve_master(const GridState& gs, const MasterEquationSpec& spec, double t, double dt);

struct TrajectoryPoint {
    double t = 0.0;
    Moments m;
    double trace = 0.0;
    double purity = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;  // includes t = 0
    GridState final_state;
};

/// Evolution sampled at `samples` equal intervals.
Trajectory evolve_trajectory(const GridState& gs, const MasterEquationSpec& spec, double t,
                             double dt, int samples);

/// `t,x_mean,p_mean,x2,p2,trace,purity`
CsvTable trajectory_table(const Trajectory& traj);
/// `x,xp,re,im`
CsvTable snapshot_table(const GridState& gs);

// Scattering environment: wavenumber k, flux N v / V, effective cross section.
struct EnvironmentSpec {
    double k = 0.0;
    double flux = 0.0;
    double sigma_eff = 0.0;
};

/// Lambda = k^2 flux sigma_eff in the units of the inputs.
double localization_rate(const EnvironmentSpec& env);

enum class ScatteringRegime { ManyScatterings, SingleScattering };

struct DecoherenceTimescales {
    double lambda = 0.0;
    double t_dec_small = 0.0;   // 1 / (Lambda dx^2), valid for k dx < 1
    double t_dec_single = 0.0;  // k^2 / Lambda, valid for k dx > 1
    ScatteringRegime regime = ScatteringRegime::ManyScatterings;
};

DecoherenceTimescales decoherence_timescales(const EnvironmentSpec& env, double separation);

struct MacroscopicBody {
    double mass_si = 0.0;      // kg
    double temperature = 0.0;  // K
    double delta_x = 0.0;      // m
};

struct RatioResult {
    double ratio = 0.0;           // m k_B T dx^2 / hbar^2
    double thermal_wavelength = 0.0;  // hbar / sqrt(m k_B T)
};

RatioResult decoherence_relaxation_ratio(const MacroscopicBody& body);

struct EnvironmentRecord {
    std::string environment;
    double size = 0.0;
    EnvironmentSpec spec;
};

/// Reads the `environments` array of an environments file: each entry has
/// `name`, `k`, `flux` and a `sizes` array of {`a`, `sigma_eff`}.
std::vector<EnvironmentRecord> environments_from_json(const json& j);

}  // namespace zenolab::spatial
