#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "zenolab/apparatus.hpp"
#include "zenolab/ifm.hpp"
#include "zenolab/ratekin.hpp"
#include "zenolab/spatial.hpp"
#include "zenolab/unitary.hpp"
#include "zenolab/vnmeasure.hpp"

using namespace zenolab;

namespace {

DensityMatrix random_mixed(oracle::Generator& gen, int dim)
{
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    const RealVector w = gen.probabilities(dim);
    for (int k = 0; k < dim; ++k) {
        const StateVector s = gen.state(dim);
        m += w(k) * s * s.adjoint();
    }
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

}  // namespace

TEST_SUITE("properties")
{
    TEST_CASE("partial trace keeps trace and Hermiticity")
    {
        oracle::Generator gen(61);
        for (int trial = 0; trial < 25; ++trial) {
            const int da = gen.integer(1, 4);
            const int db = gen.integer(1, 4);
            const DensityMatrix rho = random_mixed(gen, da * db);
            for (Subsystem keep : {Subsystem::A, Subsystem::B}) {
                const DensityMatrix r = partial_trace(rho, da, db, keep);
                CHECK(std::abs(r.matrix().trace() - 1.0) < 1e-12);
                CHECK((r.matrix() - r.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-14);
            }
        }
    }

    TEST_CASE("quadratic onset coefficient equals the energy variance")
    {
        oracle::Generator gen(62);
        for (int trial = 0; trial < 20; ++trial) {
            const int dim = gen.integer(2, 8);
            const Hamiltonian h(gen.hermitian(dim));
            const StateVector u = gen.state(dim);
            const double var = unitary::energy_variance(h, u);
            const auto fit = unitary::fit_quadratic_onset(h, u, 1e-3, 1e-2);
            CHECK(fit.t2_coefficient == doctest::Approx(var).epsilon(0.01));
            // Residual beyond t^2 is O(t^4).
            for (double t : {1e-3, 5e-3, 1e-2}) {
                const double resid = std::abs(unitary::survival_probability(h, u, t) - (1.0 - var * t * t));
                CHECK(resid <= 2.0 * std::abs(fit.t4_coefficient) * std::pow(t, 4) + 1e-14);
            }
        }
    }

    TEST_CASE("Zeno limit n (1 - P_n) -> Var t^2")
    {
        oracle::Generator gen(63);
        for (int trial = 0; trial < 15; ++trial) {
            const int dim = gen.integer(2, 6);
            ComplexMatrix hm = gen.hermitian(dim);
            hm /= hm.cwiseAbs().rowwise().sum().maxCoeff();
            const Hamiltonian h(hm);
            const StateVector u = gen.state(dim);
            const double t = gen.uniform(0.2, 1.0);
            const double var = unitary::energy_variance(h, u);
            const long long n = 10000;
            const double deficit =
                static_cast<double>(n) * (1.0 - unitary::repeated_measurement_survival(h, u, t, n));
            CHECK(deficit == doctest::Approx(var * t * t).epsilon(0.02));
        }
    }

    TEST_CASE("entanglement: populations fixed, joint pure, reduced purity not above one")
    {
        oracle::Generator gen(64);
        for (int trial = 0; trial < 25; ++trial) {
            const int dim = gen.integer(2, 5);
            const StateVector c = gen.state(dim);
            const auto m = vnmeasure::entangle_measurement(c, dim + gen.integer(0, 3));
            for (int n = 0; n < dim; ++n) CHECK(std::abs(m.reduced(n, n).real() - std::norm(c(n))) < 1e-12);
            CHECK(m.joint.purity() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(m.reduced.purity() <= 1.0 + 1e-12);
            const double s = gen.uniform(-1.0, 1.0);
            const StateVector c2 = gen.state(2);
            const auto partial = vnmeasure::entangle_with_pointers(c2, vnmeasure::pointer_pair_with_overlap(s));
            CHECK(partial.reduced.purity() <= 1.0 + 1e-12);
        }
    }

    TEST_CASE("dephasing chain equals collapse statistics")
    {
        oracle::Generator gen(65);
        for (int trial = 0; trial < 40; ++trial) {
            const double v = gen.uniform(-2.0, 2.0);
            const double e = gen.uniform(-2.0, 2.0);
            const double t = gen.uniform(0.0, 4.0);
            const long long n = gen.integer(1, 60);
            const auto rec = vnmeasure::recorded_chain(v, e, t, std::min<long long>(n, 12));
            CHECK(std::abs(rec.p_never_found_2 -
                           unitary::repeated_measurement_survival(Hamiltonian::two_level(v, e),
                                                                  basis_state(2, 0), t,
                                                                  std::min<long long>(n, 12))) < 1e-10);
            CHECK(std::abs(vnmeasure::n_step_measured_chain(v, e, t, n) -
                           oracle::collapse_chain_p2(v, e, t, n)) < 1e-10);
        }
    }

    TEST_CASE("momentum factorization on random parameters")
    {
        oracle::Generator gen(66);
        const auto app = apparatus::ApparatusProfile::gaussian(1.0, 49, 6.0);
        for (int trial = 0; trial < 8; ++trial) {
            const apparatus::TwoStatePointerModel m{gen.uniform(0.1, 1.5), gen.uniform(-1.0, 1.0),
                                                    gen.uniform(0.0, 6.0)};
            const double t = gen.uniform(0.1, 2.0);
            const double joint = oracle::pointer_joint_p2(m.v, m.e, m.gamma, app.p_grid(), app.weights(), t);
            CHECK(std::abs(apparatus::two_state_transition(m, app, t) - joint) < 1e-8);
        }
    }

    TEST_CASE("P_alpha stays in [0, 1] inside the perturbative window")
    {
        oracle::Generator gen(67);
        const auto app = apparatus::ApparatusProfile::gaussian(1.0);
        for (const char* name : {"flat", "peaked"}) {
            auto ls = apparatus::preset_level_structure(name);
            for (int trial = 0; trial < 10; ++trial) {
                ls.gamma_alpha = std::pow(10.0, gen.uniform(-2.0, 4.0));
                const double t = gen.uniform(1e-3, 0.016);  // max rate is below 6.2
                const auto est = apparatus::transition_probability_alpha(ls, app, t);
                CHECK(est.probability >= 0.0);
                CHECK(est.probability <= 1.0);
                CHECK_FALSE(est.advisory);
            }
        }
    }

    TEST_CASE("Zeno tail drift per decade")
    {
        const auto app = apparatus::ApparatusProfile::gaussian(1.0);
        for (const char* name : {"flat", "peaked"}) {
            auto ls = apparatus::preset_level_structure(name);
            ls.gamma_alpha = 1e3;
            const double a = 1e3 * apparatus::transition_probability_alpha(ls, app, 0.05).probability;
            ls.gamma_alpha = 1e4;
            const double b = 1e4 * apparatus::transition_probability_alpha(ls, app, 0.05).probability;
            CHECK(std::abs(b - a) / b < 0.05);
        }
    }

    TEST_CASE("spatial evolution keeps trace and Hermiticity")
    {
        oracle::Generator gen(68);
        for (int trial = 0; trial < 6; ++trial) {
            const auto gs = spatial::GridState::gaussian_packet(32, 10.0, gen.uniform(0.5, 2.0),
                                                                gen.uniform(-1.0, 1.0),
                                                                gen.uniform(-1.0, 1.0), gen.uniform(0.6, 1.2));
            spatial::MasterEquationSpec spec;
            spec.lambda = gen.uniform(0.0, 3.0);
            spec.gamma_friction = gen.uniform(0.0, 1.0);
            const auto out = spatial::evolve_master(gs, spec, 0.2, spatial::max_stable_step(gs, spec));
            CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK((out.rho - out.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            // Caldeira-Leggett dynamics is not positivity preserving when
            // friction dominates Lambda, so purity is bounded only without it.
            if (spec.gamma_friction == 0.0) CHECK(out.purity() <= gs.purity() + 1e-10);
        }
    }

    TEST_CASE("bath hook computes Lambda = m gamma kT exactly")
    {
        oracle::Generator gen(69);
        for (int trial = 0; trial < 20; ++trial) {
            const double m = gen.uniform(0.1, 10.0);
            const double g = gen.uniform(0.0, 5.0);
            const double kt = gen.uniform(0.0, 5.0);
            const auto spec = spatial::MasterEquationSpec::from_bath(m, g, kt);
            CHECK(spec.lambda == m * g * kt);
            CHECK(spec.gamma_friction == g);
        }
    }

    TEST_CASE("IFM equals repeated measurement under a rotation Hamiltonian")
    {
        for (long long n : {1LL, 3LL, 5LL, 40LL, 100LL}) {
            const double theta = std::acos(-1.0) / (2.0 * static_cast<double>(n));
            ComplexMatrix sy(2, 2);
            sy << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
            // exp(-i theta sigma_y) rotates (h, v) by theta per unit time.
            const Hamiltonian h(theta * sy);
            const double p = unitary::repeated_measurement_survival(h, basis_state(2, 0),
                                                                    static_cast<double>(n), n);
            CHECK(std::abs(ifm::run_ifm({n, true}).p_h - p) < 1e-12);
        }
    }

    TEST_CASE("IFM bookkeeping conserves probability every cycle")
    {
        oracle::Generator gen(70);
        for (int trial = 0; trial < 20; ++trial) {
            ifm::PolarizationState s;
            const double angle = gen.uniform(0.0, 1.5);
            for (int k = 0; k < 30; ++k) {
                const auto r = ifm::rotate(s, angle);
                CHECK(std::norm(r.amp_h) + std::norm(r.amp_v) ==
                      doctest::Approx(std::norm(s.amp_h) + std::norm(s.amp_v)).epsilon(1e-14));
                s = ifm::absorb_vertical(r);
                CHECK(s.amp_v == Complex(0.0));
                CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("rate equations conserve probability, stay non-negative and compose")
    {
        oracle::Generator gen(71);
        for (int trial = 0; trial < 30; ++trial) {
            const int dim = gen.integer(2, 10);
            const ratekin::RateMatrix a(gen.rate_generator(dim, gen.uniform(0.1, 20.0)));
            const ratekin::ProbabilityVector p0(gen.probabilities(dim));
            const double t1 = gen.uniform(0.0, 3.0);
            const double t2 = gen.uniform(0.0, 3.0);
            ratekin::SolveReport report;
            const auto p1 = ratekin::solve_rate_equation(a, p0, t1, &report);
            CHECK(p1.values().sum() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(p1.values().minCoeff() >= 0.0);
            CHECK(report.min_raw_component > -1e-12);
            const auto p12 = ratekin::solve_rate_equation(a, p1, t2);
            const auto direct = ratekin::solve_rate_equation(a, p0, t1 + t2);
            CHECK((p12.values() - direct.values()).cwiseAbs().maxCoeff() < 1e-9);
            const RealMatrix m = ratekin::transition_matrix(a, t1);
            CHECK(m.minCoeff() >= 0.0);
        }
    }
}
