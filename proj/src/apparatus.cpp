#include "zenolab/apparatus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "zenolab/errors.hpp"
#include "zenolab/parallel.hpp"

namespace zenolab::apparatus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSeriesThreshold = 1e-6;
constexpr double kResolutionTolerance = 1e-6;
constexpr double kPerturbativeBound = 0.1;
constexpr int kProfilePieces = 128;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Linear interpolation on a strictly increasing grid; zero outside.
double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at)
{
    if (x.empty() || at < x.front() || at > x.back()) {
        return 0.0;
    }
    auto it = std::upper_bound(x.begin(), x.end(), at);
    if (it == x.end()) {
        return y.back();
    }
    const auto hi = static_cast<std::size_t>(it - x.begin());
    const std::size_t lo = hi - 1;
    const double frac = (at - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + frac * (y[hi] - y[lo]);
}

double gaussian_density(double p, double sigma)
{
    return std::exp(-0.5 * (p / sigma) * (p / sigma)) / (std::sqrt(kTwoPi) * sigma);
}

void require_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "time must be finite and non-negative");
    }
}

void require_strictly_increasing(const std::vector<double>& x, const char* what)
{
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be strictly increasing");
        }
    }
}

}  // namespace

ApparatusProfile ApparatusProfile::gaussian(double sigma_p, int points, double half_width_sigmas)
{
    if (!(sigma_p > 0.0) || points < 3 || !(half_width_sigmas > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "Gaussian profile needs sigma > 0, >= 3 points");
    }
    ApparatusProfile prof;
    prof.sigma_ = sigma_p;
    prof.half_width_sigmas_ = half_width_sigmas;
    const double half = half_width_sigmas * sigma_p;
    prof.p_ = lin_spaced(-half, half, points);
    const double dp = 2.0 * half / (points - 1);
    prof.w_.resize(prof.p_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < prof.p_.size(); ++i) {
        const double end_factor = (i == 0 || i + 1 == prof.p_.size()) ? 0.5 : 1.0;
        prof.w_[i] = end_factor * gaussian_density(prof.p_[i], sigma_p) * dp;
        total += prof.w_[i];
    }
    for (double& w : prof.w_) {
        w /= total;
    }
    prof.phi0_ = gaussian_density(0.0, sigma_p);
    prof.validate();
    return prof;
}

ApparatusProfile ApparatusProfile::from_samples(std::vector<double> p, std::vector<double> density)
{
    if (p.size() != density.size() || p.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "profile needs >= 3 paired samples");
    }
    require_strictly_increasing(p, "momentum grid");
    ApparatusProfile prof;
    prof.p_ = std::move(p);
    prof.samples_ = std::move(density);
    prof.w_.assign(prof.p_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < prof.p_.size(); ++i) {
        const double half = 0.5 * (prof.p_[i + 1] - prof.p_[i]);
        prof.w_[i] += half * prof.samples_[i];
        prof.w_[i + 1] += half * prof.samples_[i + 1];
    }
    prof.kinks_.assign(prof.p_.begin() + 1, prof.p_.end() - 1);
    prof.phi0_ = interpolate(prof.p_, prof.samples_, 0.0);
    prof.validate();
    return prof;
}

void ApparatusProfile::validate() const
{
    double total = 0.0;
    for (double w : w_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::UnnormalizedProfile, "weights must be finite and non-negative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw Error(ErrorCode::UnnormalizedProfile, "weights sum to " + format_double(total));
    }
}

double ApparatusProfile::density(double p) const
{
    if (sigma_ > 0.0) {
        return (p < p_min() || p > p_max()) ? 0.0 : gaussian_density(p, sigma_);
    }
    return interpolate(p_, samples_, p);
}

ApparatusProfile ApparatusProfile::refined() const
{
    const int points = 2 * static_cast<int>(p_.size()) - 1;
    if (sigma_ > 0.0) {
        return gaussian(sigma_, points, half_width_sigmas_);
    }
    std::vector<double> p;
    std::vector<double> d;
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (i > 0) {
            p.push_back(0.5 * (p_[i - 1] + p_[i]));
            d.push_back(0.5 * (samples_[i - 1] + samples_[i]));
        }
        p.push_back(p_[i]);
        d.push_back(samples_[i]);
    }
    return from_samples(std::move(p), std::move(d));
}

double rabi_probability(double v, double delta, double t)
{
    const double omega_sq = v * v + delta * delta;
    if (omega_sq == 0.0) {
        return 0.0;
    }
    const double s = std::sin(std::sqrt(omega_sq) * t);
    return v * v / omega_sq * s * s;
}

double two_state_transition(const TwoStatePointerModel& model, const ApparatusProfile& app,
                            double t)
{
    require_time(t);
    if (model.gamma < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "pointer coupling must be non-negative");
    }
    const auto& p = app.p_grid();
    const auto& w = app.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += w[i] * rabi_probability(model.v, model.gamma * p[i] - 0.5 * model.e, t);
    }
    return std::clamp(sum, 0.0, 1.0);
}

CheckedValue two_state_transition_checked(const TwoStatePointerModel& model,
                                          const ApparatusProfile& app, double t)
{
    CheckedValue out;
    out.value = two_state_transition(model, app, t);
    out.refinement_delta = std::abs(two_state_transition(model, app.refined(), t) - out.value);
    out.resolved = out.refinement_delta < kResolutionTolerance;
    return out;
}

RateFit two_state_rate_regime(const TwoStatePointerModel& model, const ApparatusProfile& app,
                              const TimeWindow& window)
{
    if (window.samples < 8) {
        throw Error(ErrorCode::WindowTooShort, "rate fit needs at least 8 samples");
    }
    if (!(window.t_start > 0.0 && window.t_end > window.t_start)) {
        throw Error(ErrorCode::InvalidArgument, "window needs 0 < t_start < t_end");
    }
    RateFit fit;
    fit.times = lin_spaced(window.t_start, window.t_end, window.samples);
    fit.probabilities.reserve(fit.times.size());
    std::vector<double> log_t;
    std::vector<double> log_p;
    for (double t : fit.times) {
        const double p = two_state_transition(model, app, t);
        fit.probabilities.push_back(p);
        if (p > 0.0) {
            log_t.push_back(std::log(t));
            log_p.push_back(std::log(p));
        }
    }
    const LineFit line = fit_line(fit.times, fit.probabilities);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    if (log_t.size() >= 2) {
        fit.loglog_slope = fit_line(log_t, log_p).slope;
    }
    return fit;
}

void LevelStructure::validate() const
{
    const std::size_t n = energy_grid.size();
    if (n < 2 || level_density.size() != n || coupling_sq.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "level structure arrays must align (>= 2 samples)");
    }
    require_strictly_increasing(energy_grid, "energy grid");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(level_density[i] >= 0.0) || !(coupling_sq[i] >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "level density and |V|^2 must be non-negative");
        }
    }
    if (!(gamma_alpha >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gamma must be non-negative");
    }
}

double LevelStructure::sigma_at(double e) const
{
    return interpolate(energy_grid, level_density, e);
}

double LevelStructure::coupling_sq_at(double e) const
{
    return interpolate(energy_grid, coupling_sq, e);
}

double LevelStructure::strength_at(double e) const
{
    return sigma_at(e) * coupling_sq_at(e);
}

double LevelStructure::integrated_strength() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < energy_grid.size(); ++i) {
        sum += 0.5 * (energy_grid[i + 1] - energy_grid[i]) *
               (level_density[i] * coupling_sq[i] + level_density[i + 1] * coupling_sq[i + 1]);
    }
    return sum;
}

LevelStructure level_structure_from_json(const json& j)
{
    LevelStructure ls;
    ls.energy_grid = j.at("E").get<std::vector<double>>();
    ls.level_density = j.at("sigma").get<std::vector<double>>();
    ls.coupling_sq = j.at("v_sq").get<std::vector<double>>();
    ls.e0 = j.at("E0").get<double>();
    ls.gamma_alpha = j.value("gamma", 0.0);
    ls.validate();
    return ls;
}

LevelStructure preset_level_structure(std::string_view name)
{
    constexpr double base = 1.0 / (2.0 * std::numbers::pi);
    LevelStructure ls;
    if (name == "flat") {
        ls.energy_grid = lin_spaced(-10.0, 10.0, 201);
        ls.coupling_sq.assign(ls.energy_grid.size(), base);
    } else if (name == "peaked") {
        ls.energy_grid = lin_spaced(-20.0, 20.0, 4001);
        for (double e : ls.energy_grid) {
            ls.coupling_sq.push_back(base * (1.0 + 5.0 * std::exp(-0.5 * (e - 5.0) * (e - 5.0))));
        }
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown level preset '" + std::string(name) + "'");
    }
    ls.level_density.assign(ls.energy_grid.size(), 1.0);
    ls.e0 = 0.0;
    ls.validate();
    return ls;
}

json to_json(const LevelStructure& ls)
{
    return {{"E", ls.energy_grid},   {"sigma", ls.level_density}, {"v_sq", ls.coupling_sq},
            {"E0", ls.e0},           {"gamma", ls.gamma_alpha}};
}

double resonance_factor(double x, double t)
{
    const double half_phase = 0.5 * x * t;
    if (std::abs(half_phase) < kSeriesThreshold) {
        // sin^2(u)/u^2 = 1 - u^2/3 + O(u^4), times t^2/4.
        return 0.25 * t * t * (1.0 - half_phase * half_phase / 3.0);
    }
    const double s = std::sin(half_phase);
    return s * s / (x * x);
}

double transition_probability_alpha_e(const LevelStructure& ls, const ApparatusProfile& app,
                                      double e, double t)
{
    require_time(t);
    ls.validate();
    const double v_sq = ls.coupling_sq_at(e);
    const auto& p = app.p_grid();
    const auto& w = app.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += w[i] * resonance_factor(e - ls.e0 + ls.gamma_alpha * p[i], t);
    }
    return 4.0 * v_sq * sum;
}

TransitionEstimate transition_probability_alpha(const LevelStructure& ls,
                                                const ApparatusProfile& app, double t)
{
    require_time(t);
    ls.validate();
    const double gamma = ls.gamma_alpha;
    if (gamma == 0.0) {
        throw Error(ErrorCode::ZeroGamma, "use golden_rule_rate for vanishing pointer coupling");
    }

    // Integrate |Phi(p)|^2 S(E0 - gamma p) over the profile support, splitting
    // at every point where either factor has a kink.
    const double lo = app.p_min();
    const double hi = app.p_max();
    std::vector<double> cuts = lin_spaced(lo, hi, kProfilePieces + 1);
    for (double k : app.kinks()) {
        cuts.push_back(k);
    }
    for (double e : ls.energy_grid) {
        const double p = (ls.e0 - e) / gamma;
        if (p > lo && p < hi) {
            cuts.push_back(p);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double half = 0.5 * (cuts[i + 1] - cuts[i]);
        double piece = 0.0;
        for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
            const double p = mid + half * kGlNodes[q];
            piece += kGlWeights[q] * app.density(p) * ls.strength_at(ls.e0 - gamma * p);
        }
        integral += half * piece;
    }

    TransitionEstimate est;
    est.probability = kTwoPi * t * integral;
    est.rate = kTwoPi * integral;
    est.advisory = t * est.rate > kPerturbativeBound;
    return est;
}

double golden_rule_rate(const LevelStructure& ls)
{
    ls.validate();
    return kTwoPi * ls.sigma_at(ls.e0) * ls.coupling_sq_at(ls.e0);
}

double zeno_tail_constant(const LevelStructure& ls, const ApparatusProfile& app, double t)
{
    ls.validate();
    return kTwoPi * t * app.phi0_density() * ls.integrated_strength();
}

std::vector<RegimePoint> regime_scan(const LevelStructure& ls, const ApparatusProfile& app,
                                     const std::vector<double>& gammas, double t,
                                     unsigned threads)
{
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] > 0.0) || (i > 0 && !(gammas[i] > gammas[i - 1]))) {
            throw Error(ErrorCode::InvalidArgument, "gamma range must be positive and increasing");
        }
    }
    std::vector<RegimePoint> out(gammas.size());
    parallel_for(gammas.size(), threads, [&](std::size_t i) {
        LevelStructure local = ls;
        local.gamma_alpha = gammas[i];
        const TransitionEstimate est = transition_probability_alpha(local, app, t);
        out[i] = {gammas[i], est.probability, est.advisory};
    });
    return out;
}

RegimeSummary summarize_regime_scan(const std::vector<RegimePoint>& scan,
                                    const LevelStructure& ls, double t)
{
    if (scan.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "regime summary needs at least three points");
    }
    RegimeSummary s;
    s.golden_rule_probability = golden_rule_rate(ls) * t;
    s.left_relative_error =
        std::abs(scan.front().p_alpha - s.golden_rule_probability) / s.golden_rule_probability;

    const double tail_start = scan.back().gamma / 10.0;
    double num = 0.0;
    double den = 0.0;
    std::vector<const RegimePoint*> tail;
    for (const auto& pt : scan) {
        if (pt.gamma >= tail_start * (1.0 - 1e-12)) {
            tail.push_back(&pt);
            num += pt.p_alpha / pt.gamma;
            den += 1.0 / (pt.gamma * pt.gamma);
        }
    }
    s.tail_constant = num / den;
    double mean = 0.0;
    for (const auto* pt : tail) {
        mean += pt->p_alpha;
    }
    mean /= static_cast<double>(tail.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (const auto* pt : tail) {
        const double r = pt->p_alpha - s.tail_constant / pt->gamma;
        ss_res += r * r;
        ss_tot += (pt->p_alpha - mean) * (pt->p_alpha - mean);
    }
    s.tail_r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;

    const auto best = std::max_element(scan.begin(), scan.end(), [](const auto& a, const auto& b) {
        return a.p_alpha < b.p_alpha;
    });
    // A bump must clear both ends by more than quadrature round-off.
    const double margin = 1.0 + 1e-9;
    s.has_interior_maximum = best != scan.begin() && best != scan.end() - 1 &&
                             best->p_alpha > scan.front().p_alpha * margin &&
                             best->p_alpha > scan.back().p_alpha * margin;
    s.max_over_golden_rule = best->p_alpha / s.golden_rule_probability;
    return s;
}

CsvTable regime_table(const std::vector<RegimePoint>& scan)
{
    CsvTable table({"gamma", "p_alpha"});
    for (const auto& pt : scan) {
        table.add_row({pt.gamma, pt.p_alpha});
    }
    return table;
}

}  // namespace zenolab::apparatus
