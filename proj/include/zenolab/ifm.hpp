#pragma once

// Interaction-free interrogation: a photon passes N times through a
// polarization rotator; between passes an optional absorber in the vertical
// arm removes the V component. The interferometer that separates and
// recombines the arms is treated as the identity when nothing blocks it.

#include <cstdint>
#include <vector>

#include "zenolab/errors.hpp"
#include "zenolab/io.hpp"

namespace zenolab::ifm {

struct PolarizationState {
    Complex amp_h{1.0, 0.0};
    Complex amp_v{0.0, 0.0};
    double p_absorbed = 0.0;

    double total() const { return std::norm(amp_h) + std::norm(amp_v) + p_absorbed; }
};

struct IfmConfig {
    long long n_cycles = 1;
    bool object_present = true;
    double delta_theta = 0.0;  // 0 selects pi / (2 N)

    double rotation() const;
    void validate() const;
};

struct IfmResult {
    double p_h = 0.0;
    double p_v = 0.0;
    double p_absorbed = 0.0;
};

/// Rotates (h, v) by `angle` without loss.
PolarizationState rotate(const PolarizationState& s, double angle);
/// Moves |amp_v|^2 into p_absorbed.
PolarizationState absorb_vertical(const PolarizationState& s);

IfmResult run_ifm(const IfmConfig& cfg);

/// cos^{2N}(pi / 2N)
double transmission_closed_form(long long n);

struct MonteCarloResult {
    IfmResult frequencies;
    long long trials = 0;
    /// Binomial standard error of the horizontal fraction.
    double p_h_stderr = 0.0;
};

/// Samples single-photon trajectories: at each absorber the photon is either
/// absorbed or projected onto H.
MonteCarloResult ifm_monte_carlo(const IfmConfig& cfg, long long trials, std::uint64_t seed);

struct SweepPoint {
    long long n = 0;
    double p_h_present = 0.0;
    double p_absorbed = 0.0;
};

std::vector<SweepPoint> ifm_sweep(const std::vector<long long>& n_values);

/// `N,p_h,p_v,p_absorbed`
CsvTable ifm_table();
void append_ifm_row(CsvTable& table, long long n, const IfmResult& r);

}  // namespace zenolab::ifm
