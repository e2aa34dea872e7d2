#include "zenolab/ifm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace zenolab::ifm {

double IfmConfig::rotation() const
{
    return delta_theta > 0.0 ? delta_theta : std::numbers::pi / (2.0 * static_cast<double>(n_cycles));
}

void IfmConfig::validate() const
{
    if (n_cycles < 1) {
        throw Error(ErrorCode::InvalidArgument, "cycle count must be at least 1");
    }
    if (!(delta_theta >= 0.0) || delta_theta > std::numbers::pi / 2.0) {
        throw Error(ErrorCode::InvalidArgument, "rotation angle must lie in (0, pi/2]");
    }
}

PolarizationState rotate(const PolarizationState& s, double angle)
{
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    PolarizationState out = s;
    out.amp_h = c * s.amp_h - sn * s.amp_v;
    out.amp_v = sn * s.amp_h + c * s.amp_v;
    return out;
}

PolarizationState absorb_vertical(const PolarizationState& s)
{
    PolarizationState out = s;
    out.p_absorbed += std::norm(s.amp_v);
    out.amp_v = 0.0;
    return out;
}

IfmResult run_ifm(const IfmConfig& cfg)
{
    cfg.validate();
    const double angle = cfg.rotation();
    PolarizationState s;
    for (long long k = 0; k < cfg.n_cycles; ++k) {
        s = rotate(s, angle);
        if (cfg.object_present) s = absorb_vertical(s);
    }
    return IfmResult{std::norm(s.amp_h), std::norm(s.amp_v), s.p_absorbed};
}

double transmission_closed_form(long long n)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "cycle count must be at least 1");
    }
    const double c = std::cos(std::numbers::pi / (2.0 * static_cast<double>(n)));
    return std::pow(c * c, static_cast<double>(n));
}

MonteCarloResult ifm_monte_carlo(const IfmConfig& cfg, long long trials, std::uint64_t seed)
{
    cfg.validate();
    if (trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "trial count must be positive");
    }
    const double angle = cfg.rotation();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    long long n_h = 0;
    long long n_v = 0;
    long long n_abs = 0;
    for (long long trial = 0; trial < trials; ++trial) {
        PolarizationState s;
        bool absorbed = false;
        for (long long k = 0; k < cfg.n_cycles && !absorbed; ++k) {
            s = rotate(s, angle);
            if (cfg.object_present) {
                if (uniform(rng) < std::norm(s.amp_v)) {
                    absorbed = true;
                } else {
                    s.amp_h /= std::abs(s.amp_h);
                    s.amp_v = 0.0;
                }
            }
        }
        if (absorbed) {
            ++n_abs;
        } else if (uniform(rng) < std::norm(s.amp_h)) {
            ++n_h;
        } else {
            ++n_v;
        }
    }
    MonteCarloResult r;
    r.trials = trials;
    const auto total = static_cast<double>(trials);
    r.frequencies = IfmResult{n_h / total, n_v / total, n_abs / total};
    // Standard error from the exact probability is not available here; use
    // the sample estimate with a floor of one count.
    const double p = std::clamp(r.frequencies.p_h, 1.0 / total, 1.0 - 1.0 / total);
    r.p_h_stderr = std::sqrt(p * (1.0 - p) / total);
    return r;
}

std::vector<SweepPoint> ifm_sweep(const std::vector<long long>& n_values)
{
    std::vector<SweepPoint> out;
    out.reserve(n_values.size());
    for (long long n : n_values) {
        const IfmResult r = run_ifm(IfmConfig{n, true, 0.0});
        out.push_back(SweepPoint{n, r.p_h, r.p_absorbed});
    }
    return out;
}

CsvTable ifm_table()
{
    return CsvTable({"N", "p_h", "p_v", "p_absorbed"});
}

void append_ifm_row(CsvTable& table, long long n, const IfmResult& r)
{
    table.add_row(std::vector<double>{static_cast<double>(n), r.p_h, r.p_v, r.p_absorbed});
}

}  // namespace zenolab::ifm
