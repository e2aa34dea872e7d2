#include "zenolab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "zenolab/apparatus.hpp"
#include "zenolab/ifm.hpp"
#include "zenolab/parallel.hpp"
#include "zenolab/ratekin.hpp"
#include "zenolab/sampling.hpp"
#include "zenolab/spatial.hpp"
#include "zenolab/unitary.hpp"
#include "zenolab/vnmeasure.hpp"

#ifndef ZENOLAB_DATA_DIR
#define ZENOLAB_DATA_DIR "data"
#endif

namespace zenolab::cli {

namespace {

// Bad user input: reported with exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr const char* kHalfPi = "1.5707963267948966";

ParamSpec real(std::string name, std::string def, std::string desc)
{
    return {std::move(name), ParamType::Real, std::move(def), std::move(desc), {}};
}

ParamSpec integer(std::string name, std::string def, std::string desc)
{
    return {std::move(name), ParamType::Integer, std::move(def), std::move(desc), {}};
}

ParamSpec flag(std::string name, std::string def, std::string desc)
{
    return {std::move(name), ParamType::Flag, std::move(def), std::move(desc), {}};
}

ParamSpec path(std::string name, std::string desc)
{
    return {std::move(name), ParamType::Path, "", std::move(desc), {}};
}

ParamSpec text(std::string name, std::string def, std::string desc)
{
    return {std::move(name), ParamType::Text, std::move(def), std::move(desc), {}};
}

ParamSpec mode(std::vector<std::string> choices)
{
    std::string desc = "one of:";
    for (const auto& c : choices) desc += " " + c;
    std::string def = choices.front();
    return {"mode", ParamType::Text, def, desc, std::move(choices)};
}

std::vector<SubcommandInfo> build_subcommands()
{
    return {
        {"zeno",
         "Survival probability under N ideal measurements, quadratic onset, exponential decay",
         "quantum Zeno effect: survival under repeated measurement",
         {mode({"measurements", "curve", "onset"}),
          real("v", "1", "coupling V of the two-level Hamiltonian"),
          real("e", "0", "energy of level 2"),
          real("t", "1", "total time"),
          integer("n", "1", "number of measurements"),
          real("gamma", "1", "decay rate of the exponential reference law"),
          path("hamiltonian", "Hermitian matrix JSON replacing the two-level model"),
          real("t_min", "1e-3", "onset fit window start"),
          real("t_max", "1e-2", "onset fit window end"),
          integer("samples", "32", "onset fit samples")}},
        {"chain",
         "Two-level chain with and without intermediate measurement; pointer entanglement",
         "measurement as dephasing and entanglement; loss of interference",
         {mode({"sweep", "two-step", "entangle", "recorded"}),
          real("v", "1", "coupling V"),
          real("e", "0", "energy of level 2"),
          real("t", "0.05", "total time (sweep, recorded) or step time (two-step)"),
          integer("n", "2", "number of steps"),
          real("c1", "0.6", "real amplitude of |1> in the measured state"),
          real("overlap", "0", "pointer overlap <Phi_1|Phi_2>; 0 uses orthogonal pointers"),
          integer("env", "2", "pointer dimension for orthogonal pointers")}},
        {"pointer2",
         "Two-state system continuously coupled to a momentum pointer",
         "continuous measurement: damping of transitions by a pointer",
         {mode({"curve", "checked", "coupling", "fit"}),
          real("v", "1", "coupling V"),
          real("e", "0", "energy of level 2"),
          real("gamma", "1", "pointer coupling"),
          real("sigma_p", "1", "pointer momentum spread"),
          integer("points", "257", "momentum grid points"),
          real("half_width", "8", "grid half width in units of sigma_p"),
          real("t", kHalfPi, "time"),
          real("t_start", "0.5", "rate fit window start"),
          real("t_end", "5", "rate fit window end"),
          integer("samples", "16", "rate fit samples")}},
        {"regimes",
         "Transition probability into a level group versus pointer coupling",
         "golden rule, Zeno and anti-Zeno regimes",
         {mode({"scan", "spectrum", "summary"}),
          text("preset", "flat", "built-in level group: flat or peaked"),
          path("levels", "level group JSON (E, sigma, v_sq, E0) replacing the preset"),
          real("sigma_p", "1", "pointer momentum spread"),
          integer("points", "257", "momentum grid points"),
          real("gamma", "1", "pointer coupling"),
          real("t", "0.05", "time"),
          real("e", "0", "final-state energy (spectrum)"),
          real("gamma_min", "0.01", "summary scan lower coupling"),
          real("gamma_max", "1e4", "summary scan upper coupling"),
          integer("count", "41", "summary scan points")}},
        {"spatial",
         "Position-space master equation with decoherence and friction",
         "decoherence of spatial superpositions; Ehrenfest motion",
         {mode({"trajectory", "snapshot"}),
          integer("n", "128", "grid points"),
          real("length", "16", "periodic box length"),
          real("mass", "1", "particle mass"),
          real("x0", "0", "initial packet centre"),
          real("p0", "2", "initial mean momentum"),
          real("width", "0.5", "initial position spread"),
          real("lambda", "0", "localization rate"),
          real("gamma", "0", "friction rate"),
          real("kt", "0", "bath k_B T; when > 0, lambda = m gamma kT"),
          flag("kinetic", "true", "include the free kinetic term"),
          real("t", "0.5", "evolution time"),
          real("dt", "0", "time step; 0 uses the stability bound"),
          integer("samples", "10", "trajectory samples")}},
        {"table1",
         "Localization rates for scattering environments and object sizes",
         "localization rate of macroscopic objects",
         {path("environments", "environments JSON (default: bundled data)"),
          real("dx", "0", "coherence separation in cm; 0 uses the object size")}},
        {"ratio",
         "Decoherence to relaxation ratio of a macroscopic body",
         "decoherence versus relaxation; thermal wavelength",
         {real("mass", "1e-3", "mass in kg"),
          real("temperature", "300", "temperature in K"),
          real("dx", "1e-2", "separation in m")}},
        {"ifm",
         "Interaction-free interrogation by repeated polarization rotation",
         "interaction-free measurement",
         {mode({"exact", "presence", "montecarlo"}),
          integer("n", "5", "number of cycles N"),
          flag("object", "true", "absorber present"),
          real("delta_theta", "0", "rotation per cycle; 0 uses pi/(2N)"),
          integer("trials", "100000", "Monte Carlo photons"),
          integer("seed", "1", "Monte Carlo seed")}},
        {"rates",
         "Classical rate equation, Pauli equation and the von Neumann contrast",
         "rate equations and the Pauli equation",
         {mode({"solve", "pauli", "contrast"}),
          path("rates", "rate matrix JSON (dim, rates); default is a single decay"),
          real("gamma", "1", "decay rate of the default two-state generator"),
          text("p0", "", "initial probabilities, comma separated (default: state 0)"),
          real("t", "1", "time"),
          path("hamiltonian", "Hermitian matrix JSON for the contrast"),
          real("v", "1", "coupling of the default two-level Hamiltonian"),
          real("e", "0", "energy of level 2 of the default Hamiltonian")}},
    };
}

std::optional<double> parse_real(const std::string& s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> parse_integer(const std::string& s)
{
    long long v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last) return v;
    // Accept integral values written in floating notation, e.g. 1e5.
    if (auto r = parse_real(s); r && *r == std::floor(*r) && std::abs(*r) < 9.0e18) {
        return static_cast<long long>(*r);
    }
    return std::nullopt;
}

std::optional<bool> parse_flag(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
}

void validate_value(const ParamSpec& spec, const std::string& value)
{
    auto fail = [&](const char* expected) {
        throw ConfigError("invalid value '" + value + "' for '" + spec.name + "': expected " +
                          expected);
    };
    switch (spec.type) {
        case ParamType::Real:
            if (!parse_real(value)) fail("a real number");
            break;
        case ParamType::Integer:
            if (!parse_integer(value)) fail("an integer");
            break;
        case ParamType::Flag:
            if (!parse_flag(value)) fail("true or false");
            break;
        case ParamType::Text:
            if (!spec.choices.empty() &&
                std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
                fail(spec.description.c_str());
            }
            break;
        case ParamType::Path:
            break;
    }
}

class Params {
public:
    explicit Params(const SubcommandInfo& info) : info_(&info)
    {
        for (const auto& p : info.params) values_[p.name] = p.default_value;
    }

    const ParamSpec& spec(const std::string& key) const
    {
        for (const auto& p : info_->params) {
            if (p.name == key) return p;
        }
        throw ConfigError("unknown parameter '" + key + "' for subcommand '" + info_->name + "'");
    }

    void set(const std::string& key, const std::string& value)
    {
        validate_value(spec(key), value);
        values_[key] = value;
    }

    double real(const std::string& key) const { return *parse_real(values_.at(key)); }
    long long integer(const std::string& key) const { return *parse_integer(values_.at(key)); }
    bool flag(const std::string& key) const { return *parse_flag(values_.at(key)); }
    const std::string& text(const std::string& key) const { return values_.at(key); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

private:
    const SubcommandInfo* info_;
    std::map<std::string, std::string> values_;
};

struct Context {
    unsigned threads = 1;
};

std::string num(double v)
{
    return format_double(v);
}

std::string num(long long v)
{
    return std::to_string(v);
}

void require_positive(const Params& p, const std::string& key)
{
    const bool ok = p.spec(key).type == ParamType::Integer ? p.integer(key) > 0 : p.real(key) > 0.0;
    if (!ok) throw ConfigError("invalid value '" + p.text(key) + "' for '" + key + "': must be positive");
}

json load_json_file(const std::string& file, const std::string& key)
{
    std::string content;
    try {
        content = read_file(file);
    } catch (const Error&) {
        throw ConfigError("cannot read file '" + file + "' given for '" + key + "'");
    }
    try {
        return json::parse(content);
    } catch (const json::exception&) {
        throw ConfigError("file '" + file + "' given for '" + key + "' is not valid JSON");
    }
}

Hamiltonian hamiltonian_from(const Params& p)
{
    if (!p.text("hamiltonian").empty()) {
        return Hamiltonian(matrix_from_json(load_json_file(p.text("hamiltonian"), "hamiltonian")));
    }
    return Hamiltonian::two_level(p.real("v"), p.real("e"));
}

// ---- zeno -----------------------------------------------------------------

CsvTable zeno_measurements(const Params& p, const Context&)
{
    require_positive(p, "n");
    const Hamiltonian h = hamiltonian_from(p);
    const StateVector u = basis_state(h.dim(), 0);
    const long long n = p.integer("n");
    const double t = p.real("t");
    const double var = unitary::energy_variance(h, u);
    CsvTable table({"n", "p_n", "zeno_approx"});
    table.add_row(std::vector<std::string>{
        num(n), num(unitary::repeated_measurement_survival(h, u, t, n)),
        num(unitary::short_time_prediction(var, t / std::sqrt(static_cast<double>(n))))});
    return table;
}

CsvTable zeno_curve(const Params& p, const Context&)
{
    require_positive(p, "n");
    const Hamiltonian h = hamiltonian_from(p);
    const StateVector u = basis_state(h.dim(), 0);
    const std::vector<double> times{p.real("t")};
    CsvTable table = unitary::survival_table();
    unitary::append_csv(unitary::survival_curve(h, u, times), table);
    unitary::append_csv(unitary::repeated_measurement_curve(h, u, times, p.integer("n")), table);
    unitary::append_csv(unitary::exponential_curve(unitary::DecayLaw{p.real("gamma")}, times),
                        table);
    return table;
}

CsvTable zeno_onset(const Params& p, const Context&)
{
    const Hamiltonian h = hamiltonian_from(p);
    const StateVector u = basis_state(h.dim(), 0);
    const double var = unitary::energy_variance(h, u);
    const auto fit = unitary::fit_quadratic_onset(h, u, p.real("t_min"), p.real("t_max"),
                                                  static_cast<int>(p.integer("samples")));
    CsvTable table({"variance", "t2_coefficient", "t4_coefficient", "max_residual",
                    "short_time_at_t_max"});
    table.add_row(std::vector<double>{var, fit.t2_coefficient, fit.t4_coefficient,
                                      fit.max_residual,
                                      unitary::short_time_prediction(var, p.real("t_max"))});
    return table;
}

// ---- chain ----------------------------------------------------------------

CsvTable chain_sweep(const Params& p, const Context&)
{
    require_positive(p, "n");
    const double v = p.real("v");
    const double e = p.real("e");
    const double t = p.real("t");
    const long long n = p.integer("n");
    CsvTable table = vnmeasure::chain_sweep_table();
    vnmeasure::append_chain_row(table, n, vnmeasure::n_step_measured_chain(v, e, t, 1),
                                vnmeasure::n_step_measured_chain(v, e, t, n));
    return table;
}

CsvTable chain_two_step(const Params& p, const Context&)
{
    const auto r = vnmeasure::two_step_chain(p.real("v"), p.real("e"), p.real("t"));
    CsvTable table({"p2_coherent", "p2_measured", "ratio"});
    table.add_row(std::vector<double>{r.p2_coherent, r.p2_measured,
                                      r.p2_coherent > 0.0 ? r.p2_measured / r.p2_coherent : 0.0});
    return table;
}

json chain_two_step_document(const Params& p)
{
    return vnmeasure::to_json(vnmeasure::two_step_chain(p.real("v"), p.real("e"), p.real("t")));
}

CsvTable chain_entangle(const Params& p, const Context&)
{
    const double c1 = p.real("c1");
    if (std::abs(c1) > 1.0) {
        throw ConfigError("invalid value '" + p.text("c1") + "' for 'c1': must lie in [-1, 1]");
    }
    StateVector system(2);
    system << c1, std::sqrt(1.0 - c1 * c1);
    const double s = p.real("overlap");
    const auto m = s == 0.0 ? vnmeasure::entangle_measurement(system, p.integer("env"))
                            : vnmeasure::entangle_with_pointers(
                                  system, vnmeasure::pointer_pair_with_overlap(s));
    CsvTable table({"joint_purity", "reduced_purity", "rho_11", "rho_22", "coherence_re",
                    "coherence_im", "sigma_z"});
    const auto& r = m.reduced;
    table.add_row(std::vector<double>{m.joint.purity(), r.purity(), r(0, 0).real(),
                                      r(1, 1).real(), r(0, 1).real(), r(0, 1).imag(),
                                      expectation(r, pauli_z())});
    return table;
}

CsvTable chain_recorded(const Params& p, const Context&)
{
    require_positive(p, "n");
    const long long n = p.integer("n");
    const auto r = vnmeasure::recorded_chain(p.real("v"), p.real("e"), p.real("t"), n);
    CsvTable table({"n", "p2", "p_never_found_2"});
    table.add_row(std::vector<std::string>{num(n), num(r.p2), num(r.p_never_found_2)});
    return table;
}

// ---- pointer2 -------------------------------------------------------------

apparatus::ApparatusProfile profile_from(const Params& p, double half_width)
{
    require_positive(p, "sigma_p");
    require_positive(p, "points");
    return apparatus::ApparatusProfile::gaussian(p.real("sigma_p"),
                                                 static_cast<int>(p.integer("points")), half_width);
}

apparatus::TwoStatePointerModel pointer_model(const Params& p)
{
    return {p.real("v"), p.real("e"), p.real("gamma")};
}

CsvTable pointer2_curve(const Params& p, const Context&)
{
    const auto app = profile_from(p, p.real("half_width"));
    CsvTable table({"t", "p2"});
    table.add_row(std::vector<double>{
        p.real("t"), apparatus::two_state_transition(pointer_model(p), app, p.real("t"))});
    return table;
}

CsvTable pointer2_checked(const Params& p, const Context&)
{
    const auto app = profile_from(p, p.real("half_width"));
    const auto c = apparatus::two_state_transition_checked(pointer_model(p), app, p.real("t"));
    CsvTable table({"t", "p2", "refinement_delta", "resolved"});
    table.add_row(std::vector<double>{p.real("t"), c.value, c.refinement_delta,
                                      c.resolved ? 1.0 : 0.0});
    return table;
}

CsvTable pointer2_coupling(const Params& p, const Context&)
{
    const auto app = profile_from(p, p.real("half_width"));
    CsvTable table({"gamma", "p2"});
    table.add_row(std::vector<double>{
        p.real("gamma"), apparatus::two_state_transition(pointer_model(p), app, p.real("t"))});
    return table;
}

CsvTable pointer2_fit(const Params& p, const Context&)
{
    const auto app = profile_from(p, p.real("half_width"));
    const apparatus::TimeWindow window{p.real("t_start"), p.real("t_end"),
                                       static_cast<int>(p.integer("samples"))};
    const auto fit = apparatus::two_state_rate_regime(pointer_model(p), app, window);
    CsvTable table({"gamma", "slope", "intercept", "r_squared", "loglog_slope"});
    table.add_row(std::vector<double>{p.real("gamma"), fit.slope, fit.intercept, fit.r_squared,
                                      fit.loglog_slope});
    return table;
}

// ---- regimes --------------------------------------------------------------

apparatus::LevelStructure levels_from(const Params& p)
{
    if (!p.text("levels").empty()) {
        try {
            return apparatus::level_structure_from_json(load_json_file(p.text("levels"), "levels"));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("file given for 'levels' is malformed: ") + e.what());
        }
    }
    const std::string& preset = p.text("preset");
    if (preset != "flat" && preset != "peaked") {
        throw ConfigError("invalid value '" + preset + "' for 'preset': expected flat or peaked");
    }
    return apparatus::preset_level_structure(preset);
}

CsvTable regimes_scan(const Params& p, const Context&)
{
    auto ls = levels_from(p);
    ls.gamma_alpha = p.real("gamma");
    const auto app = profile_from(p, 8.0);
    const auto est = apparatus::transition_probability_alpha(ls, app, p.real("t"));
    return apparatus::regime_table({apparatus::RegimePoint{ls.gamma_alpha, est.probability,
                                                           est.advisory}});
}

CsvTable regimes_spectrum(const Params& p, const Context&)
{
    auto ls = levels_from(p);
    ls.gamma_alpha = p.real("gamma");
    const auto app = profile_from(p, 8.0);
    CsvTable table({"e", "p_alpha_e"});
    table.add_row(std::vector<double>{
        p.real("e"),
        apparatus::transition_probability_alpha_e(ls, app, p.real("e"), p.real("t"))});
    return table;
}

CsvTable regimes_summary(const Params& p, const Context& ctx)
{
    require_positive(p, "gamma_min");
    require_positive(p, "gamma_max");
    if (p.integer("count") < 2) {
        throw ConfigError("invalid value '" + p.text("count") + "' for 'count': must be >= 2");
    }
    const auto ls = levels_from(p);
    const auto app = profile_from(p, 8.0);
    const double t = p.real("t");
    const auto gammas = log_spaced(p.real("gamma_min"), p.real("gamma_max"),
                                   static_cast<std::size_t>(p.integer("count")));
    const auto scan = apparatus::regime_scan(ls, app, gammas, t, ctx.threads);
    const auto s = apparatus::summarize_regime_scan(scan, ls, t);
    CsvTable table({"golden_rule_rate", "golden_rule_probability", "left_relative_error",
                    "zeno_tail_constant", "tail_constant", "tail_r_squared",
                    "has_interior_maximum", "max_over_golden_rule"});
    table.add_row(std::vector<double>{
        apparatus::golden_rule_rate(ls), s.golden_rule_probability, s.left_relative_error,
        apparatus::zeno_tail_constant(ls, app, t), s.tail_constant, s.tail_r_squared,
        s.has_interior_maximum ? 1.0 : 0.0, s.max_over_golden_rule});
    return table;
}

// ---- spatial --------------------------------------------------------------

struct SpatialSetup {
    spatial::GridState state;
    spatial::MasterEquationSpec spec;
    double dt = 0.0;
};

SpatialSetup spatial_setup(const Params& p)
{
    require_positive(p, "n");
    SpatialSetup s;
    s.state = spatial::GridState::gaussian_packet(static_cast<int>(p.integer("n")),
                                                  p.real("length"), p.real("mass"),
                                                  p.real("x0"), p.real("p0"), p.real("width"));
    if (p.real("kt") > 0.0) {
        s.spec = spatial::MasterEquationSpec::from_bath(p.real("mass"), p.real("gamma"),
                                                        p.real("kt"));
    } else {
        s.spec.lambda = p.real("lambda");
        s.spec.gamma_friction = p.real("gamma");
    }
    s.spec.include_kinetic = p.flag("kinetic");
    s.dt = p.real("dt") > 0.0 ? p.real("dt") : spatial::max_stable_step(s.state, s.spec);
    return s;
}

CsvTable spatial_trajectory(const Params& p, const Context&)
{
    const auto s = spatial_setup(p);
    const auto traj = spatial::evolve_trajectory(s.state, s.spec, p.real("t"), s.dt,
                                                 static_cast<int>(p.integer("samples")));
    return spatial::trajectory_table(traj);
}

CsvTable spatial_snapshot(const Params& p, const Context&)
{
    const auto s = spatial_setup(p);
    return spatial::snapshot_table(spatial::evolve_master(s.state, s.spec, p.real("t"), s.dt));
}

// ---- table1 / ratio -------------------------------------------------------

CsvTable table1(const Params& p, const Context&)
{
    const std::string file = p.text("environments").empty()
                                 ? std::string(ZENOLAB_DATA_DIR) + "/environments.json"
                                 : p.text("environments");
    const auto records = spatial::environments_from_json(load_json_file(file, "environments"));
    CsvTable table({"environment", "size", "k", "flux", "sigma_eff", "lambda", "log10_lambda",
                    "t_dec_small", "t_dec_single", "regime"});
    for (const auto& r : records) {
        const double dx = p.real("dx") > 0.0 ? p.real("dx") : r.size;
        const auto ts = spatial::decoherence_timescales(r.spec, dx);
        table.add_row(std::vector<std::string>{
            r.environment, num(r.size), num(r.spec.k), num(r.spec.flux), num(r.spec.sigma_eff),
            num(ts.lambda), num(std::log10(ts.lambda)), num(ts.t_dec_small), num(ts.t_dec_single),
            ts.regime == spatial::ScatteringRegime::ManyScatterings ? "many" : "single"});
    }
    return table;
}

CsvTable ratio(const Params& p, const Context&)
{
    const spatial::MacroscopicBody body{p.real("mass"), p.real("temperature"), p.real("dx")};
    const auto r = spatial::decoherence_relaxation_ratio(body);
    CsvTable table({"mass", "temperature", "dx", "ratio", "log10_ratio", "thermal_wavelength"});
    table.add_row(std::vector<double>{body.mass_si, body.temperature, body.delta_x, r.ratio,
                                      std::log10(r.ratio), r.thermal_wavelength});
    return table;
}

// ---- ifm ------------------------------------------------------------------

ifm::IfmConfig ifm_config(const Params& p)
{
    require_positive(p, "n");
    return ifm::IfmConfig{p.integer("n"), p.flag("object"), p.real("delta_theta")};
}

CsvTable ifm_exact(const Params& p, const Context&)
{
    const auto cfg = ifm_config(p);
    CsvTable table = ifm::ifm_table();
    ifm::append_ifm_row(table, cfg.n_cycles, ifm::run_ifm(cfg));
    return table;
}

CsvTable ifm_presence(const Params& p, const Context&)
{
    const auto cfg = ifm_config(p);
    CsvTable table({"N", "p_h_present", "p_absorbed"});
    for (const auto& pt : ifm::ifm_sweep({cfg.n_cycles})) {
        table.add_row(std::vector<std::string>{num(pt.n), num(pt.p_h_present), num(pt.p_absorbed)});
    }
    return table;
}

CsvTable ifm_montecarlo(const Params& p, const Context&)
{
    require_positive(p, "trials");
    const auto cfg = ifm_config(p);
    const auto mc = ifm::ifm_monte_carlo(cfg, p.integer("trials"),
                                         static_cast<std::uint64_t>(p.integer("seed")));
    const auto exact = ifm::run_ifm(cfg);
    CsvTable table({"N", "p_h", "p_v", "p_absorbed", "p_h_stderr", "p_h_exact"});
    table.add_row(std::vector<std::string>{
        num(cfg.n_cycles), num(mc.frequencies.p_h), num(mc.frequencies.p_v),
        num(mc.frequencies.p_absorbed), num(mc.p_h_stderr), num(exact.p_h)});
    return table;
}

// ---- rates ----------------------------------------------------------------

ratekin::RateMatrix rates_from(const Params& p)
{
    if (!p.text("rates").empty()) {
        return ratekin::rate_matrix_from_json(load_json_file(p.text("rates"), "rates"));
    }
    return ratekin::RateMatrix::decay(p.real("gamma"));
}

ratekin::ProbabilityVector p0_from(const Params& p, Eigen::Index dim)
{
    const std::string& s = p.text("p0");
    if (s.empty()) return ratekin::ProbabilityVector(basis_state(dim, 0).real());
    std::vector<double> values;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto v = parse_real(item);
        if (!v) throw ConfigError("invalid value '" + s + "' for 'p0': expected comma separated reals");
        values.push_back(*v);
    }
    if (static_cast<Eigen::Index>(values.size()) != dim) {
        throw ConfigError("invalid value '" + s + "' for 'p0': expected " + std::to_string(dim) +
                          " entries");
    }
    try {
        return ratekin::ProbabilityVector(RealVector(Eigen::Map<RealVector>(values.data(), dim)));
    } catch (const Error& e) {
        throw ConfigError("invalid value '" + s + "' for 'p0': " + e.what());
    }
}

CsvTable rates_solve(const Params& p, const Context&)
{
    const auto a = rates_from(p);
    const auto p0 = p0_from(p, a.dim());
    CsvTable table = ratekin::rate_table(a.dim());
    ratekin::append_rate_row(table, p.real("t"), ratekin::solve_rate_equation(a, p0, p.real("t")));
    return table;
}

CsvTable rates_pauli(const Params& p, const Context&)
{
    const auto a = rates_from(p);
    const auto p0 = p0_from(p, a.dim());
    const RealVector d = ratekin::pauli_equation_step(a, DensityMatrix::diagonal(p0.values()));
    CsvTable table({"state", "dp_dt"});
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        table.add_row(std::vector<std::string>{num(static_cast<long long>(i)), num(d(i))});
    }
    return table;
}

ratekin::FreezeReport contrast_report(const Params& p)
{
    const auto a = rates_from(p);
    const auto p0 = p0_from(p, a.dim());
    const Hamiltonian h = hamiltonian_from(p);
    if (h.dim() != a.dim()) {
        throw ConfigError("Hamiltonian dimension does not match the rate matrix dimension");
    }
    return ratekin::freeze_contrast(h, a, DensityMatrix::diagonal(p0.values()), p.real("t"));
}

CsvTable rates_contrast(const Params& p, const Context&)
{
    const auto r = contrast_report(p);
    CsvTable table({"state", "von_neumann_rate", "pauli_rate", "unitary_population",
                    "pauli_population"});
    for (std::size_t i = 0; i < r.pauli_rates.size(); ++i) {
        table.add_row(std::vector<std::string>{
            num(static_cast<long long>(i)), num(r.von_neumann_rates[i]), num(r.pauli_rates[i]),
            num(r.unitary_populations[i]), num(r.pauli_populations[i])});
    }
    return table;
}

json rates_contrast_document(const Params& p)
{
    return ratekin::to_json(contrast_report(p));
}

// ---- dispatch -------------------------------------------------------------

struct ModeDef {
    std::string subcommand;
    std::string mode;
    bool sweepable;
    std::function<CsvTable(const Params&, const Context&)> table;
    std::function<json(const Params&)> document;  // optional JSON report
};

const std::vector<ModeDef>& modes()
{
    static const std::vector<ModeDef> defs{
        {"zeno", "measurements", true, zeno_measurements, nullptr},
        {"zeno", "curve", true, zeno_curve, nullptr},
        {"zeno", "onset", false, zeno_onset, nullptr},
        {"chain", "sweep", true, chain_sweep, nullptr},
        {"chain", "two-step", true, chain_two_step, chain_two_step_document},
        {"chain", "entangle", true, chain_entangle, nullptr},
        {"chain", "recorded", true, chain_recorded, nullptr},
        {"pointer2", "curve", true, pointer2_curve, nullptr},
        {"pointer2", "checked", true, pointer2_checked, nullptr},
        {"pointer2", "coupling", true, pointer2_coupling, nullptr},
        {"pointer2", "fit", true, pointer2_fit, nullptr},
        {"regimes", "scan", true, regimes_scan, nullptr},
        {"regimes", "spectrum", true, regimes_spectrum, nullptr},
        {"regimes", "summary", false, regimes_summary, nullptr},
        {"spatial", "trajectory", false, spatial_trajectory, nullptr},
        {"spatial", "snapshot", false, spatial_snapshot, nullptr},
        {"table1", "", false, table1, nullptr},
        {"ratio", "", true, ratio, nullptr},
        {"ifm", "exact", true, ifm_exact, nullptr},
        {"ifm", "presence", true, ifm_presence, nullptr},
        {"ifm", "montecarlo", true, ifm_montecarlo, nullptr},
        {"rates", "solve", true, rates_solve, nullptr},
        {"rates", "pauli", false, rates_pauli, nullptr},
        {"rates", "contrast", false, rates_contrast, rates_contrast_document},
    };
    return defs;
}

const ModeDef& find_mode(const std::string& sub, const std::string& mode)
{
    for (const auto& m : modes()) {
        if (m.subcommand == sub && m.mode == mode) return m;
    }
    throw ConfigError("subcommand '" + sub + "' has no mode '" + mode + "'");
}

struct SweepAxis {
    std::string name;
    std::vector<std::string> values;
};

SweepAxis parse_sweep(const std::string& spec, const Params& params)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("invalid value '" + spec + "' for 'sweep': expected name=lo:hi:count[:log]");
    }
    SweepAxis axis;
    axis.name = spec.substr(0, eq);
    const ParamSpec& ps = params.spec(axis.name);
    if (ps.type != ParamType::Real && ps.type != ParamType::Integer) {
        throw ConfigError("invalid value '" + spec + "' for 'sweep': '" + axis.name +
                          "' is not numeric");
    }
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    const bool log_scale = parts.size() == 4 && parts[3] == "log";
    const bool lin_scale = parts.size() == 3 || (parts.size() == 4 && parts[3] == "lin");
    if (!log_scale && !lin_scale) {
        throw ConfigError("invalid value '" + spec + "' for 'sweep': expected name=lo:hi:count[:log]");
    }
    const auto lo = parse_real(parts[0]);
    const auto hi = parse_real(parts[1]);
    const auto count = parse_integer(parts[2]);
    if (!lo || !hi || !count) {
        throw ConfigError("invalid value '" + spec + "' for 'sweep': bounds and count must be numeric");
    }
    if (*count < 2) {
        throw ConfigError("invalid value '" + spec + "' for 'sweep': count must be >= 2");
    }
    if (log_scale && (*lo <= 0.0 || *hi <= 0.0)) {
        throw ConfigError("invalid value '" + spec + "' for 'sweep': log bounds must be positive");
    }
    const auto n = static_cast<std::size_t>(*count);
    std::vector<double> grid = log_scale ? log_spaced(std::min(*lo, *hi), std::max(*lo, *hi), n)
                                         : lin_spaced(std::min(*lo, *hi), std::max(*lo, *hi), n);
    if (ps.type == ParamType::Integer) {
        std::vector<long long> ints;
        for (double g : grid) ints.push_back(std::llround(g));
        ints.erase(std::unique(ints.begin(), ints.end()), ints.end());
        for (long long k : ints) axis.values.push_back(std::to_string(k));
    } else {
        for (double g : grid) axis.values.push_back(format_double(g));
    }
    return axis;
}

std::string config_value_string(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw ConfigError("unsupported JSON value " + v.dump());
}

std::string usage_text()
{
    std::ostringstream os;
    os << "Usage: zenolab <subcommand> [--param value ...] [--sweep name=lo:hi:count[:log]]\n"
       << "               [--config file.json] [--out file] [--format csv|json] [--sequential]\n\n"
       << "Subcommands:\n";
    for (const auto& s : subcommands()) {
        std::string name = s.name;
        name.resize(10, ' ');
        os << "  " << name << s.description << "\n" << std::string(12, ' ') << "topic: " << s.topic
           << "\n";
    }
    os << "\nRun 'zenolab <subcommand> --help' for its parameters.\n";
    return os.str();
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct Invocation {
    std::map<std::string, std::string> flags;
    std::string config;
    std::string out;
    std::string format;
    std::string sweep;
    bool sequential = false;
};

int execute(const SubcommandInfo& info, const Invocation& inv, std::ostream& out)
{
    Params params(info);
    std::string format = "csv";
    std::string out_path;
    std::string sweep;
    bool sequential = false;

    if (!inv.config.empty()) {
        const json cfg = load_json_file(inv.config, "config");
        if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
        for (const auto& [key, value] : cfg.items()) {
            if (key == "format") {
                format = config_value_string(value);
            } else if (key == "out") {
                out_path = config_value_string(value);
            } else if (key == "sweep") {
                sweep = config_value_string(value);
            } else if (key == "sequential") {
                sequential = value.is_boolean() && value.get<bool>();
            } else {
                params.set(key, config_value_string(value));
            }
        }
    }
    for (const auto& [key, value] : inv.flags) params.set(key, value);
    if (!inv.format.empty()) format = inv.format;
    if (!inv.out.empty()) out_path = inv.out;
    if (!inv.sweep.empty()) sweep = inv.sweep;
    sequential = sequential || inv.sequential;

    if (format != "csv" && format != "json") {
        throw ConfigError("invalid value '" + format + "' for 'format': expected csv or json");
    }
    const ModeDef& def = find_mode(info.name, params.has("mode") ? params.text("mode") : "");
    Context ctx;
    ctx.threads = sequential ? 1u : default_thread_count();

    CsvTable table({});
    std::optional<json> document;
    if (!sweep.empty()) {
        if (!def.sweepable) {
            throw ConfigError("invalid value '" + sweep + "' for 'sweep': '" + info.name +
                              (def.mode.empty() ? "" : " " + def.mode) + "' does not sweep");
        }
        const SweepAxis axis = parse_sweep(sweep, params);
        std::vector<Params> points(axis.values.size(), params);
        for (std::size_t i = 0; i < points.size(); ++i) points[i].set(axis.name, axis.values[i]);
        std::vector<CsvTable> parts(points.size(), CsvTable({}));
        parallel_for(points.size(), ctx.threads, [&](std::size_t i) {
            Context inner;
            parts[i] = def.table(points[i], inner);
        });
        table = CsvTable(parts.front().header());
        for (const auto& part : parts) {
            for (const auto& row : part.cells()) table.add_row(row);
        }
    } else {
        table = def.table(params, ctx);
        if (def.document && format == "json") document = def.document(params);
    }

    const std::string text =
        format == "csv" ? table.str() : (document ? *document : table.to_json()).dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        write_file_atomic(out_path, text);
    }
    return 0;
}

}  // namespace

const std::vector<SubcommandInfo>& subcommands()
{
    static const std::vector<SubcommandInfo> list = build_subcommands();
    return list;
}

const std::vector<OperationCoverage>& operation_coverage()
{
    static const std::vector<OperationCoverage> table{
        {"qstate", "herm_propagator", "rates", "contrast"},
        {"qstate", "expectation", "chain", "entangle"},
        {"qstate", "partial_trace", "chain", "entangle"},
        {"unitary", "survival_probability", "zeno", "curve"},
        {"unitary", "energy_variance", "zeno", "measurements"},
        {"unitary", "short_time_prediction", "zeno", "measurements"},
        {"unitary", "repeated_measurement_survival", "zeno", "measurements"},
        {"unitary", "exponential_survival", "zeno", "curve"},
        {"unitary", "fit_quadratic_onset", "zeno", "onset"},
        {"vnmeasure", "apply_dephasing", "chain", "sweep"},
        {"vnmeasure", "two_step_chain", "chain", "two-step"},
        {"vnmeasure", "entangle_measurement", "chain", "entangle"},
        {"vnmeasure", "diagonal_freeze_rate", "rates", "contrast"},
        {"vnmeasure", "n_step_measured_chain", "chain", "sweep"},
        {"vnmeasure", "recorded_chain", "chain", "recorded"},
        {"apparatus", "two_state_transition", "pointer2", "curve"},
        {"apparatus", "two_state_rate_regime", "pointer2", "fit"},
        {"apparatus", "transition_probability_alpha_e", "regimes", "spectrum"},
        {"apparatus", "transition_probability_alpha", "regimes", "scan"},
        {"apparatus", "golden_rule_rate", "regimes", "summary"},
        {"apparatus", "regime_scan", "regimes", "summary"},
        {"spatial", "localization_rate", "table1", ""},
        {"spatial", "decoherence_timescales", "table1", ""},
        {"spatial", "decoherence_relaxation_ratio", "ratio", ""},
        {"spatial", "evolve_master", "spatial", "snapshot"},
        {"spatial", "moments", "spatial", "trajectory"},
        {"ifm", "run_ifm", "ifm", "exact"},
        {"ifm", "ifm_sweep", "ifm", "presence"},
        {"ratekin", "solve_rate_equation", "rates", "solve"},
        {"ratekin", "pauli_equation_step", "rates", "pauli"},
        {"ratekin", "freeze_contrast", "rates", "contrast"},
        {"cli", "run_subcommand", "zeno", "measurements"},
        {"cli", "list_scenarios", "", ""},
    };
    return table;
}

std::string suggest_subcommand(std::string_view name)
{
    std::string best;
    std::size_t best_d = 3;  // suggest only within two edits
    for (const auto& s : subcommands()) {
        const std::size_t d = edit_distance(name, s.name);
        if (d < best_d) {
            best_d = d;
            best = s.name;
        }
    }
    return best;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    if (args.empty()) {
        err << usage_text();
        return 1;
    }
    if (!args.front().empty() && args.front()[0] != '-') {
        const auto& subs = subcommands();
        const bool known = std::any_of(subs.begin(), subs.end(),
                                       [&](const SubcommandInfo& s) { return s.name == args[0]; });
        if (!known) {
            err << "error: unknown subcommand '" << args.front() << "'";
            const std::string hint = suggest_subcommand(args.front());
            if (!hint.empty()) err << "; did you mean '" << hint << "'?";
            err << "\n";
            return 2;
        }
    }

    CLI::App app("zenolab: measurement, decoherence and the quantum Zeno effect", "zenolab");
    app.footer(usage_text());
    app.require_subcommand(1);
    Invocation inv;
    std::map<std::string, std::string> raw;  // "sub.param" -> value
    std::vector<std::pair<CLI::App*, const SubcommandInfo*>> sub_apps;
    for (const auto& info : subcommands()) {
        CLI::App* sub = app.add_subcommand(info.name, info.description + " [" + info.topic + "]");
        sub->footer("");
        for (const auto& p : info.params) {
            sub->add_option("--" + p.name, raw[info.name + "." + p.name],
                            p.description + " (default: " +
                                (p.default_value.empty() ? "none" : p.default_value) + ")");
        }
        sub->add_option("--config", inv.config, "JSON file with parameter values");
        sub->add_option("--out", inv.out, "output file (written atomically); default stdout");
        sub->add_option("--format", inv.format, "csv or json (default csv)");
        sub->add_option("--sweep", inv.sweep, "sweep axis name=lo:hi:count[:log]");
        sub->add_flag("--sequential", inv.sequential, "evaluate sweep points on one thread");
        sub_apps.emplace_back(sub, &info);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    for (const auto& [sub, info] : sub_apps) {
        if (!sub->parsed()) continue;
        for (const auto& p : info->params) {
            if (sub->count("--" + p.name) > 0) inv.flags[p.name] = raw[info->name + "." + p.name];
        }
        try {
            return execute(*info, inv, out);
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return e.is_numerical() ? 3 : 2;
        } catch (const json::exception& e) {
            err << "error: malformed input: " << e.what() << "\n";
            return 2;
        }
    }
    err << usage_text();
    return 1;
}

}  // namespace zenolab::cli
