// Acceptance suite: one line per criterion. Exits non-zero if any criterion
// fails, except those named with --expect-fail, which must fail (a passing
// expected failure is also an error). Time budgets are enforced only in
// optimized builds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "support/golden.hpp"
#include "support/oracles.hpp"
#include "zenolab/apparatus.hpp"
#include "zenolab/ifm.hpp"
#include "zenolab/spatial.hpp"
#include "zenolab/unitary.hpp"
#include "zenolab/vnmeasure.hpp"

#ifndef ZENOLAB_DATA_DIR
#define ZENOLAB_DATA_DIR "data"
#endif

using namespace zenolab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            note << " fail: " << what << ";";
        }
    }
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Verdict&)> body;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. Quadratic onset on random Hamiltonians.
void quadratic_onset(Verdict& v)
{
    oracle::Generator gen(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = gen.integer(2, 8);
        const Hamiltonian h(gen.hermitian(dim));
        const StateVector u = gen.state(dim);
        const double var = unitary::energy_variance(h, u);
        const auto fit = unitary::fit_quadratic_onset(h, u, 1e-3, 1e-2);
        worst = std::max(worst, std::abs(fit.t2_coefficient - var) / var);
    }
    v.note << " max rel err " << fmt(worst);
    v.require(worst < 0.01, "t^2 coefficient off by more than 1%");
}

// 2. Zeno scaling for sigma_x.
void zeno_scaling(Verdict& v)
{
    const Hamiltonian h = Hamiltonian::two_level(1.0, 0.0);
    const StateVector u = basis_state(2, 0);
    const double deficit = 1.0 - unitary::repeated_measurement_survival(h, u, 1.0, 10000);
    const double rel = std::abs(deficit - 1e-4) / 1e-4;
    const double p10 = unitary::repeated_measurement_survival(h, u, 1.0, 10);
    const double oracle10 = std::pow(std::norm(oracle::propagator(oracle::two_level(1.0, 0.0), 0.1)(0, 0)), 10);
    v.note << " N=1e4 rel " << fmt(rel) << ", P_10 " << p10;
    v.require(rel < 0.02, "1 - P_N not within 2% of t^2/N");
    v.require(std::abs(p10 - oracle10) < 1e-6, "P_10 differs from the closed-form oracle");
    v.require(std::abs(p10 - 0.904686) < 1e-6, "P_10 differs from 0.904686");
}

// 3. Exponential decay is blind to the measurement count.
void exponential_invariance(Verdict& v)
{
    const unitary::DecayLaw law{0.8};
    const double p1 = unitary::exponential_survival(law, 1.7, 1);
    for (long long n : {10LL, 1000LL}) {
        v.require(unitary::exponential_survival(law, 1.7, n) == p1, "P_N differs at N = " + std::to_string(n));
    }
    v.note << " P " << p1;
}

// 4. Interference loss factor 1/2 and the 1/N law.
void interference_loss(Verdict& v)
{
    const auto r = vnmeasure::two_step_chain(1.0, 0.0, 0.05);
    const double ratio = r.p2_measured / r.p2_coherent;
    v.note << " ratio " << ratio;
    v.require(std::abs(ratio - 0.5) / 0.5 < 0.005, "two-step ratio not within 0.5% of 1/2");
    double worst = 0.0;
    const double coherent = std::pow(std::sin(0.05), 2);
    for (long long n = 1; n <= 20; ++n) {
        const double measured = vnmeasure::n_step_measured_chain(1.0, 0.0, 0.05, n);
        worst = std::max(worst, std::abs(measured / coherent * static_cast<double>(n) - 1.0));
    }
    v.note << ", 1/N max rel " << fmt(worst);
    v.require(worst < 0.05, "1/N law off by more than 5%");
}

// 5. Dephasing channel versus collapse with reset.
void channel_collapse(Verdict& v)
{
    double worst = 0.0;
    for (double vv : {0.5, 1.0, 2.0}) {
        for (double e : {0.0, 0.7, -1.3}) {
            for (double t : {0.3, 1.0, 2.5}) {
                for (long long n : {1LL, 2LL, 5LL, 10LL}) {
                    const auto rec = vnmeasure::recorded_chain(vv, e, t, n);
                    const double channel = vnmeasure::n_step_measured_chain(vv, e, t, n);
                    const double reset = unitary::repeated_measurement_survival(
                        Hamiltonian::two_level(vv, e), basis_state(2, 0), t, n);
                    worst = std::max({worst, std::abs(rec.p2 - channel),
                                      std::abs(channel - oracle::collapse_chain_p2(vv, e, t, n)),
                                      std::abs(rec.p_never_found_2 - reset)});
                }
            }
        }
    }
    v.note << " max diff " << fmt(worst);
    v.require(worst < 1e-10, "channel and collapse statistics differ");
}

// 6. Diagonal density matrices do not move under unitary dynamics.
void diagonal_freeze(Verdict& v)
{
    oracle::Generator gen(1006);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = gen.integer(2, 8);
        const Hamiltonian h(gen.hermitian(dim));
        const DensityMatrix rho = DensityMatrix::diagonal(gen.probabilities(dim));
        for (double r : vnmeasure::diagonal_freeze_rate(rho, h)) worst = std::max(worst, std::abs(r));
    }
    v.note << " max rate " << fmt(worst);
    v.require(worst < 1e-13, "diagonal rate above 1e-13");
}

// 7. Reduced density matrix after ideal entanglement.
void reduced_decoherence(Verdict& v)
{
    oracle::Generator gen(1007);
    double off = 0.0;
    double purity_err = 0.0;
    double overlap_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = gen.integer(2, 5);
        const StateVector c = gen.state(dim);
        const auto m = vnmeasure::entangle_measurement(c, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const Complex expected = i == j ? Complex(std::norm(c(i))) : Complex(0.0);
                off = std::max(off, std::abs(m.reduced(i, j) - expected));
            }
        }
        purity_err = std::max(purity_err, std::abs(m.joint.purity() - 1.0));
        const double s = gen.uniform(-1.0, 1.0);
        const StateVector c2 = gen.state(2);
        const auto p = vnmeasure::entangle_with_pointers(c2, vnmeasure::pointer_pair_with_overlap(s));
        overlap_err = std::max(overlap_err, std::abs(p.reduced(0, 1) - c2(0) * std::conj(c2(1)) * s));
    }
    v.note << " diag err " << fmt(off) << ", purity err " << fmt(purity_err) << ", overlap err "
           << fmt(overlap_err);
    v.require(off < 1e-12, "reduced matrix not diag(|c_n|^2)");
    v.require(purity_err < 1e-10, "joint state not pure");
    v.require(overlap_err < 1e-12, "partial-overlap coherence wrong");
}

// 8. Pointer coupling damps the transition; factorization is exact.
void pointer_damping(Verdict& v)
{
    const auto fine = apparatus::ApparatusProfile::gaussian(1.0, 8193);
    const double t = kPi / 2.0;
    double prev = 2.0;
    bool decreasing = true;
    for (double gamma : log_spaced(10.0, 100.0, 5)) {
        const double p = apparatus::two_state_transition({1.0, 0.0, gamma}, fine, t);
        decreasing = decreasing && p < prev;
        prev = p;
    }
    v.require(decreasing, "P_2(pi/2) not strictly decreasing over gamma in [10, 100]");

    const auto coarse = apparatus::ApparatusProfile::gaussian(1.0, 257);
    double worst = 0.0;
    for (double gamma : {0.5, 10.0, 100.0}) {
        const double f = apparatus::two_state_transition({1.0, 0.0, gamma}, coarse, t);
        const double j = oracle::pointer_joint_p2(1.0, 0.0, gamma, coarse.p_grid(), coarse.weights(), t);
        worst = std::max(worst, std::abs(f - j));
    }
    v.note << " P_2(gamma=100) " << fmt(prev) << ", joint diff " << fmt(worst);
    v.require(worst < 1e-8, "factorized and joint propagation differ");
}

// 9. Strong coupling yields a linear rate regime.
void rate_regime(Verdict& v)
{
    const auto app = apparatus::ApparatusProfile::gaussian(1.0, 4097);
    const auto fit = apparatus::two_state_rate_regime({0.1, 0.0, 50.0}, app, {0.2, 2.0, 16});
    v.note << " R^2 " << fit.r_squared << ", slope " << fmt(fit.slope);
    v.require(fit.r_squared > 0.99, "linear fit R^2 not above 0.99");
}

// 10. Golden rule, Zeno tail and the anti-Zeno bump.
void regimes(Verdict& v)
{
    const auto app = apparatus::ApparatusProfile::gaussian(1.0);
    const auto gammas = log_spaced(1e-2, 1e4, 41);
    const double t = 0.05;
    for (const char* name : {"flat", "peaked"}) {
        const auto ls = apparatus::preset_level_structure(name);
        const auto s = apparatus::summarize_regime_scan(apparatus::regime_scan(ls, app, gammas, t), ls, t);
        v.note << " " << name << ": left " << fmt(s.left_relative_error) << " tail R^2 "
               << s.tail_r_squared << " max/GR " << fmt(s.max_over_golden_rule) << ";";
        v.require(s.left_relative_error < 0.02, std::string(name) + " small-gamma rate off golden rule");
        v.require(s.tail_r_squared > 0.98, std::string(name) + " tail not c/gamma");
        if (std::string(name) == "peaked") {
            v.require(s.has_interior_maximum && s.max_over_golden_rule > 1.0, "no anti-Zeno bump");
        }
    }
}

// 11. Pure decoherence against exp(-Lambda t (x - x')^2).
void pure_decoherence(Verdict& v)
{
    const auto gs = spatial::GridState::gaussian_packet(128, 16.0, 1.0, 0.0, 2.0, 0.5);
    spatial::MasterEquationSpec spec;
    spec.lambda = 2.0;
    spec.include_kinetic = false;
    const double t = 0.5;
    const auto out = spatial::evolve_master(gs, spec, t, 1e-3);
    double worst = 0.0;
    for (int i = 0; i < gs.n; ++i) {
        for (int j = 0; j < gs.n; ++j) {
            double r = gs.x(i) - gs.x(j);
            r -= gs.length * std::floor(r / gs.length + 0.5);
            worst = std::max(worst, std::abs(out.rho(i, j) - gs.rho(i, j) * std::exp(-spec.lambda * t * r * r)));
        }
    }
    v.note << " max diff " << fmt(worst);
    v.require(worst < 1e-8, "grid evolution departs from the closed form");
}

// 12. Decoherence does not damp the mean motion; friction does.
void ehrenfest(Verdict& v)
{
    const auto gs = spatial::GridState::gaussian_packet(128, 16.0, 1.0, 0.0, 2.0, 0.5);
    const double t = 0.5;
    spatial::MasterEquationSpec free_spec;
    spatial::MasterEquationSpec deco;
    deco.lambda = 10.0;
    const double dt = spatial::max_stable_step(gs, deco);
    const auto a = spatial::evolve_trajectory(gs, free_spec, t, dt, 10);
    const auto b = spatial::evolve_trajectory(gs, deco, t, dt, 10);
    double first = 0.0;
    double heating = 0.0;
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        first = std::max({first, std::abs(a.points[k].m.x_mean - b.points[k].m.x_mean),
                          std::abs(a.points[k].m.p_mean - b.points[k].m.p_mean)});
        if (k > 0) {
            const double rate = (b.points[k].m.p2 - b.points[k - 1].m.p2) / (b.points[k].t - b.points[k - 1].t);
            heating = std::max(heating, std::abs(rate - 2.0 * deco.lambda) / (2.0 * deco.lambda));
        }
    }
    const auto fr_spec = spatial::MasterEquationSpec::from_bath(1.0, 1.0, 1.0);
    const auto fr = spatial::evolve_trajectory(gs, fr_spec, t, spatial::max_stable_step(gs, fr_spec), 10);
    double friction = 0.0;
    for (std::size_t k = 1; k + 1 < fr.points.size(); ++k) {
        const double slope = (fr.points[k + 1].m.p_mean - fr.points[k - 1].m.p_mean) /
                             (fr.points[k + 1].t - fr.points[k - 1].t);
        const double expected = -fr_spec.gamma_friction * fr.points[k].m.p_mean;
        friction = std::max(friction, std::abs(slope - expected) / std::abs(expected));
    }
    v.note << " moment diff " << fmt(first) << ", heating rel " << fmt(heating) << ", friction rel "
           << fmt(friction);
    v.require(first < 1e-5, "first moments differ between Lambda = 0 and 10");
    v.require(heating < 0.02, "d<p^2>/dt not 2 Lambda");
    v.require(friction < 0.05, "d<p>/dt not -gamma <p>");
}

// 13. Localization rates within two decades of the published table.
void table1(Verdict& v)
{
    // log10 Lambda [cm^-2 s^-1] for sizes 1e-3 cm, 1e-5 cm, 1e-6 cm.
    const std::vector<std::pair<std::string, std::vector<double>>> published{
        {"cosmic_background", {6, -6, -12}}, {"photons_300K", {19, 12, 6}},
        {"sunlight", {21, 17, 13}},          {"air", {36, 32, 30}},
        {"lab_vacuum", {23, 19, 17}}};
    const auto recs = spatial::environments_from_json(
        nlohmann::json::parse(golden::read_text(std::string(ZENOLAB_DATA_DIR) + "/environments.json")));
    v.require(recs.size() == 15, "expected 15 environment entries");
    double worst = 0.0;
    std::size_t matched = 0;
    for (const auto& [name, values] : published) {
        std::size_t k = 0;
        for (const auto& r : recs) {
            if (r.environment != name) continue;
            if (k < values.size()) {
                worst = std::max(worst, std::abs(std::log10(spatial::localization_rate(r.spec)) - values[k]));
                ++matched;
            }
            ++k;
        }
    }
    v.note << " max |dlog10| " << fmt(worst) << " over " << matched << " entries";
    v.require(matched == 15, "not every published entry has a computed counterpart");
    v.require(worst <= 2.0, "an entry is off by more than two decades");
}

// 14. Decoherence to relaxation ratio for a gram at room temperature.
void ratio(Verdict& v)
{
    const auto r = spatial::decoherence_relaxation_ratio({1e-3, 300.0, 1e-2});
    const double l = std::log10(r.ratio);
    v.note << " log10 ratio " << l;
    v.require(l >= 40.0 && l <= 41.0, "log10 ratio outside [40, 41]");
}

// 15. Interaction-free measurement.
void ifm_criterion(Verdict& v)
{
    const double p5 = ifm::run_ifm({5, true}).p_h;
    const double p100 = ifm::run_ifm({100, true}).p_h;
    // The published values carry five digits; agreement is checked to those
    // digits and to the closed form to 1e-10.
    v.require(std::abs(p5 - ifm::transmission_closed_form(5)) < 1e-10, "N=5 off the closed form");
    v.require(std::abs(p100 - ifm::transmission_closed_form(100)) < 1e-10, "N=100 off the closed form");
    v.require(std::abs(p5 - 0.60542) < 1e-5, "N=5 disagrees with 0.60542 in the printed digits");
    v.require(std::abs(p100 - 0.97563) < 1e-5, "N=100 disagrees with 0.97563 in the printed digits");
    v.require(std::abs(p100 - (1.0 - kPi * kPi / 400.0)) < 3e-4, "N=100 not near 1 - pi^2/4N");
    const double open = ifm::run_ifm({5, false}).p_h;
    v.require(open < 1e-12, "no-object P_H not below 1e-12");
    const auto mc = ifm::ifm_monte_carlo({5, true}, 100000, 15);
    const double z = std::abs(mc.frequencies.p_h - p5) / mc.p_h_stderr;
    v.require(z < 3.0, "Monte Carlo more than 3 sigma from exact");
    v.note << " P5 " << p5 << ", P100 " << p100 << ", MC z " << fmt(z);
}

// 16. CLI golden files.
void cli_regression(Verdict& v)
{
    int matched = 0;
    int total = 0;
    for (const auto& c : golden::load_manifest()) {
        ++total;
        const auto o = golden::check_case(c);
        if (o.matched) {
            ++matched;
        } else {
            v.require(false, o.name + " (" + o.detail + ")");
        }
    }
    v.note << " " << matched << "/" << total << " files identical";
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> expected_failures;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--expect-fail") expected_failures.insert(std::atoi(argv[++i]));
    }

    const std::vector<Criterion> criteria{
        {1, "quadratic onset", 5.0, quadratic_onset},
        {2, "Zeno scaling", 1.0, zeno_scaling},
        {3, "exponential invariance", 1.0, exponential_invariance},
        {4, "interference loss", 1.0, interference_loss},
        {5, "channel-collapse equivalence", 5.0, channel_collapse},
        {6, "diagonal freeze", 1.0, diagonal_freeze},
        {7, "reduced-matrix decoherence", 1.0, reduced_decoherence},
        {8, "pointer damping", 10.0, pointer_damping},
        {9, "rate regime", 10.0, rate_regime},
        {10, "golden rule / Zeno / anti-Zeno", 30.0, regimes},
        {11, "pure-decoherence closed form", 30.0, pure_decoherence},
        {12, "Ehrenfest invariance", 120.0, ehrenfest},
        {13, "localization-rate table", 1.0, table1},
        {14, "decoherence/relaxation ratio", 1.0, ratio},
        {15, "interaction-free measurement", 10.0, ifm_criterion},
        {16, "CLI regression", 60.0, cli_regression},
    };
    int failed = 0;
    int unexpected = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
#ifdef NDEBUG
        if (secs > c.budget_seconds) v.require(false, "over the " + fmt(c.budget_seconds) + " s budget");
#endif
        const bool expected = expected_failures.count(c.id) > 0;
        if (!v.pass) ++failed;
        if (v.pass == expected) ++unexpected;
        std::printf("[%s] %2d %-32s %7.2fs %s%s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    v.note.str().c_str(), expected ? " (expected to fail)" : "");
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return unexpected == 0 ? 0 : 1;
}
