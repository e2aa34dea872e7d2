#pragma once

// Survival probabilities under unitary evolution, the short-time quadratic
// expansion, and survival under N ideal intermediate measurements.

#include <string>
#include <string_view>
#include <vector>

#include "zenolab/errors.hpp"
#include "zenolab/hamiltonian.hpp"
#include "zenolab/io.hpp"

namespace zenolab::unitary {

enum class ModelTag { Unitary, RepeatedMeasurement, Exponential };

std::string_view to_string(ModelTag tag);

struct SurvivalCurve {
    std::vector<double> times;
    std::vector<double> probabilities;
    ModelTag model_tag = ModelTag::Unitary;
};

struct DecayLaw {
    double gamma = 0.0;
};

/// |<u| exp(-iHt) |u>|^2, clipped to [0, 1] against round-off.
double survival_probability(const Hamiltonian& h, const StateVector& u, double t);

/// <u|H^2|u> - <u|H|u>^2.
double energy_variance(const Hamiltonian& h, const StateVector& u);

/// max(0, 1 - variance * t^2).
double short_time_prediction(double variance, double t);

/// [P(t/n)]^n with the exact P, i.e. n ideal projective measurements with
/// reset to |u> on the "undecayed" outcome.
double repeated_measurement_survival(const Hamiltonian& h, const StateVector& u, double t,
                                     long long n);

/// exp(-gamma t); the measurement count does not enter.
double exponential_survival(const DecayLaw& law, double t, long long n);

SurvivalCurve survival_curve(const Hamiltonian& h, const StateVector& u,
                             const std::vector<double>& times);
SurvivalCurve repeated_measurement_curve(const Hamiltonian& h, const StateVector& u,
                                         const std::vector<double>& times, long long n);
SurvivalCurve exponential_curve(const DecayLaw& law, const std::vector<double>& times);

/// Appends rows `t,p,model_tag`.
void append_csv(const SurvivalCurve& curve, CsvTable& table);
CsvTable survival_table();

// Least-squares fit 1 - P(t) = a t^2 + b t^4 on log-spaced samples.
struct OnsetFit {
    double t2_coefficient = 0.0;
    double t4_coefficient = 0.0;
    double max_residual = 0.0;
};

OnsetFit fit_quadratic_onset(const Hamiltonian& h, const StateVector& u, double t_min,
                             double t_max, int samples = 32);

}  // namespace zenolab::unitary
