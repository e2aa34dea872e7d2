#include "zenolab/unitary.hpp"

#include <algorithm>
#include <cmath>

#include "zenolab/errors.hpp"

namespace zenolab {

Hamiltonian::Hamiltonian(ComplexMatrix m) : m_(std::move(m))
{
    require_hermitian(m_);
}

Hamiltonian Hamiltonian::two_level(double v, double e)
{
    ComplexMatrix m(2, 2);
    m << 0.0, v, v, e;
    return Hamiltonian(std::move(m));
}

}  // namespace zenolab

namespace zenolab::unitary {

namespace {

void require_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "time must be finite and non-negative");
    }
}

double clip_probability(double p)
{
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

std::string_view to_string(ModelTag tag)
{
    switch (tag) {
    case ModelTag::Unitary: return "unitary";
    case ModelTag::RepeatedMeasurement: return "repeated_measurement";
    case ModelTag::Exponential: return "exponential";
    }
    return "unknown";
}

double survival_probability(const Hamiltonian& h, const StateVector& u, double t)
{
    require_time(t);
    require_normalized(u);
    if (u.size() != h.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state and Hamiltonian dimensions differ");
    }
    const ComplexMatrix propagator = herm_propagator(h.matrix(), t);
    const Complex amplitude = u.dot(propagator * u);
    return clip_probability(std::norm(amplitude));
}

double energy_variance(const Hamiltonian& h, const StateVector& u)
{
    require_normalized(u);
    if (u.size() != h.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state and Hamiltonian dimensions differ");
    }
    const StateVector hu = h.matrix() * u;
    const double mean = u.dot(hu).real();
    const double second = hu.squaredNorm();
    return std::max(0.0, second - mean * mean);
}

double short_time_prediction(double variance, double t)
{
    if (variance < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "energy variance must be non-negative");
    }
    return std::clamp(1.0 - variance * t * t, 0.0, 1.0);
}

double repeated_measurement_survival(const Hamiltonian& h, const StateVector& u, double t,
                                     long long n)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "measurement count must be >= 1");
    }
    const double step = survival_probability(h, u, t / static_cast<double>(n));
    if (n == 1) {
        return step;
    }
    return clip_probability(std::pow(step, static_cast<double>(n)));
}

double exponential_survival(const DecayLaw& law, double t, long long n)
{
    require_time(t);
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "measurement count must be >= 1");
    }
    if (law.gamma < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "decay rate must be non-negative");
    }
    return std::exp(-law.gamma * t);
}

SurvivalCurve survival_curve(const Hamiltonian& h, const StateVector& u,
                             const std::vector<double>& times)
{
    require_normalized(u);
    const SpectralDecomposition spectrum(h.matrix());
    SurvivalCurve curve{times, {}, ModelTag::Unitary};
    curve.probabilities.reserve(times.size());
    for (double t : times) {
        require_time(t);
        curve.probabilities.push_back(clip_probability(std::norm(spectrum.return_amplitude(u, t))));
    }
    return curve;
}

SurvivalCurve repeated_measurement_curve(const Hamiltonian& h, const StateVector& u,
                                         const std::vector<double>& times, long long n)
{
    SurvivalCurve curve{times, {}, ModelTag::RepeatedMeasurement};
    curve.probabilities.reserve(times.size());
    for (double t : times) {
        curve.probabilities.push_back(repeated_measurement_survival(h, u, t, n));
    }
    return curve;
}

SurvivalCurve exponential_curve(const DecayLaw& law, const std::vector<double>& times)
{
    SurvivalCurve curve{times, {}, ModelTag::Exponential};
    curve.probabilities.reserve(times.size());
    for (double t : times) {
        curve.probabilities.push_back(exponential_survival(law, t, 1));
    }
    return curve;
}

CsvTable survival_table()
{
    return CsvTable({"t", "p", "model_tag"});
}

void append_csv(const SurvivalCurve& curve, CsvTable& table)
{
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        table.add_row(std::vector<std::string>{format_double(curve.times[i]),
                                               format_double(curve.probabilities[i]),
                                               std::string(to_string(curve.model_tag))});
    }
}

OnsetFit fit_quadratic_onset(const Hamiltonian& h, const StateVector& u, double t_min,
                             double t_max, int samples)
{
    if (samples < 3 || !(t_min > 0.0) || !(t_max > t_min)) {
        throw Error(ErrorCode::InvalidArgument, "onset fit needs 0 < t_min < t_max, >= 3 samples");
    }
    std::vector<double> times(static_cast<std::size_t>(samples));
    const double ratio = std::log(t_max / t_min);
    for (int i = 0; i < samples; ++i) {
        times[static_cast<std::size_t>(i)] = t_min * std::exp(ratio * i / (samples - 1));
    }
    const SurvivalCurve curve = survival_curve(h, u, times);

    // Scale the columns by t_max so the normal equations stay well conditioned.
    RealMatrix design(samples, 2);
    RealVector rhs(samples);
    for (int i = 0; i < samples; ++i) {
        const double s = times[static_cast<std::size_t>(i)] / t_max;
        design(i, 0) = s * s;
        design(i, 1) = s * s * s * s;
        rhs(i) = 1.0 - curve.probabilities[static_cast<std::size_t>(i)];
    }
    const RealVector coef = design.colPivHouseholderQr().solve(rhs);
    OnsetFit fit;
    fit.t2_coefficient = coef(0) / (t_max * t_max);
    fit.t4_coefficient = coef(1) / std::pow(t_max, 4);
    fit.max_residual = (design * coef - rhs).cwiseAbs().maxCoeff();
    return fit;
}

}  // namespace zenolab::unitary
