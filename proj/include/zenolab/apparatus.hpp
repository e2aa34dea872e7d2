#pragma once

// Continuous measurement by a momentum-coupled pointer. The two-state model
//   H = V(|1><2| + |2><1|) + E|2><2| + gamma p (|1><1| - |2><2|)
// and the many-state model with lowest-order transition probabilities into a
// group of levels with property alpha.

#include <functional>
#include <string_view>
#include <vector>

#include "zenolab/errors.hpp"
#include "zenolab/io.hpp"
#include "zenolab/sampling.hpp"

namespace zenolab::apparatus {

// Momentum distribution |Phi(p)|^2 of the pointer, as a quadrature grid plus
// a pointwise density.
class ApparatusProfile {
public:
    /// Gaussian with standard deviation sigma_p on a uniform grid of
    /// `points` samples spanning +-half_width_sigmas * sigma_p.
    static ApparatusProfile gaussian(double sigma_p, int points = 257,
                                     double half_width_sigmas = 8.0);

    /// Tabulated density; trapezoid weights. Throws UnnormalizedProfile when
    /// the density does not integrate to one within 1e-10.
    static ApparatusProfile from_samples(std::vector<double> p, std::vector<double> density);

    const std::vector<double>& p_grid() const { return p_; }
    const std::vector<double>& weights() const { return w_; }
    double phi0_density() const { return phi0_; }
    double p_min() const { return p_.front(); }
    double p_max() const { return p_.back(); }

    /// |Phi(p)|^2 at an arbitrary momentum; zero outside the grid.
    double density(double p) const;

    /// Same distribution sampled at twice the resolution.
    ApparatusProfile refined() const;

    /// Interior points where the density is not smooth (tabulated profiles).
    const std::vector<double>& kinks() const { return kinks_; }

private:
    ApparatusProfile() = default;
    void validate() const;

    std::vector<double> p_;
    std::vector<double> w_;
    std::vector<double> kinks_;
    double phi0_ = 0.0;
    double sigma_ = 0.0;  // > 0 for the analytic Gaussian
    double half_width_sigmas_ = 0.0;
    std::vector<double> samples_;  // tabulated density, when not Gaussian
};

struct TwoStatePointerModel {
    double v = 1.0;
    double e = 0.0;
    double gamma = 0.0;
};

/// Rabi transition probability for coupling v and half-detuning delta.
double rabi_probability(double v, double delta, double t);

/// P_2(t) = sum_p w(p) P_Rabi(V, gamma p - E/2, t). The interaction commutes
/// with p, so each momentum sample evolves as an independent 2x2 problem.
double two_state_transition(const TwoStatePointerModel& model, const ApparatusProfile& app,
                            double t);

struct CheckedValue {
    double value = 0.0;
    double refinement_delta = 0.0;  // |value(refined grid) - value|
    bool resolved = false;          // refinement_delta < 1e-6
};

CheckedValue two_state_transition_checked(const TwoStatePointerModel& model,
                                          const ApparatusProfile& app, double t);

struct TimeWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    int samples = 16;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double loglog_slope = 0.0;  // d log P / d log t over the window
    std::vector<double> times;
    std::vector<double> probabilities;
};

/// Linear fit of P_2(t) over the window. Throws WindowTooShort below 8 samples.
RateFit two_state_rate_regime(const TwoStatePointerModel& model, const ApparatusProfile& app,
                              const TimeWindow& window);

// Final-state levels with property alpha, sampled on an energy grid. Values
// between samples are linearly interpolated; outside the grid they vanish.
struct LevelStructure {
    std::vector<double> energy_grid;
    std::vector<double> level_density;  // sigma_alpha(E)
    std::vector<double> coupling_sq;    // |V_{alpha E, alpha0 E0}|^2
    double gamma_alpha = 0.0;
    double e0 = 0.0;

    void validate() const;
    double sigma_at(double e) const;
    double coupling_sq_at(double e) const;
    /// sigma(E) |V(E)|^2
    double strength_at(double e) const;
    /// Integral of sigma |V|^2 over the grid (trapezoid on the samples).
    double integrated_strength() const;
};

LevelStructure level_structure_from_json(const json& j);

/// Built-in level groups with E0 = 0 and golden-rule rate 1:
/// "flat"   sigma|V|^2 = 1/(2 pi) on [-10, 10];
/// "peaked" the same base on [-20, 20] plus a Gaussian bump of height
///          5/(2 pi) and width 1 centred at E = 5.
LevelStructure preset_level_structure(std::string_view name);
json to_json(const LevelStructure& ls);

/// sin^2(x t / 2) / x^2 with the removable singularity at x = 0 expanded.
double resonance_factor(double x, double t);

/// P_{alpha E} = 4 sum_p w(p) |V(E)|^2 resonance_factor(E - E0 + gamma p, t).
double transition_probability_alpha_e(const LevelStructure& ls, const ApparatusProfile& app,
                                      double e, double t);

struct TransitionEstimate {
    double probability = 0.0;
    double rate = 0.0;       // probability / t
    bool advisory = false;   // outside the perturbative window t * rate <= 0.1
};

/// P_alpha = 2 pi t Int dp |Phi(p)|^2 sigma|V|^2(E0 - gamma p), i.e. the sum
/// of P_{alpha E} over the level group. Throws ZeroGamma for gamma == 0.
TransitionEstimate transition_probability_alpha(const LevelStructure& ls,
                                                const ApparatusProfile& app, double t);

/// 2 pi sigma(E0) |V(E0)|^2.
double golden_rule_rate(const LevelStructure& ls);

/// 2 pi t |Phi(0)|^2 Int dE sigma|V|^2: the large-gamma limit of gamma * P_alpha.
double zeno_tail_constant(const LevelStructure& ls, const ApparatusProfile& app, double t);

struct RegimePoint {
    double gamma = 0.0;
    double p_alpha = 0.0;
    bool advisory = false;
};

/// P_alpha over an ordered list of positive couplings. Points are evaluated
/// independently (optionally on `threads` workers) and returned in input order.
std::vector<RegimePoint> regime_scan(const LevelStructure& ls, const ApparatusProfile& app,
                                     const std::vector<double>& gammas, double t,
                                     unsigned threads = 1);

struct RegimeSummary {
    double golden_rule_probability = 0.0;  // 2 pi t sigma(E0)|V(E0)|^2
    double left_relative_error = 0.0;      // first point vs golden rule
    double tail_constant = 0.0;            // fitted c in P = c / gamma
    double tail_r_squared = 0.0;           // over the top decade of gamma
    bool has_interior_maximum = false;
    double max_over_golden_rule = 0.0;     // max P_alpha / golden-rule value
};

RegimeSummary summarize_regime_scan(const std::vector<RegimePoint>& scan,
                                    const LevelStructure& ls, double t);

CsvTable regime_table(const std::vector<RegimePoint>& scan);

}  // namespace zenolab::apparatus
