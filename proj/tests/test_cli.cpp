#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "support/golden.hpp"
#include "zenolab/cli.hpp"

using namespace zenolab::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("zenolab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string first_line(const std::string& s)
{
    return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("usage, help and unknown subcommands")
    {
        const Run none = run({});
        CHECK(none.code == 1);
        for (const auto& s : subcommands()) CHECK(none.err.find(s.name) != std::string::npos);

        const Run help = run({"--help"});
        CHECK(help.code == 0);
        CHECK(help.out.find("zeno") != std::string::npos);

        const Run sub_help = run({"regimes", "--help"});
        CHECK(sub_help.code == 0);
        CHECK(sub_help.out.find("--gamma_max") != std::string::npos);

        const Run typo = run({"zenno"});
        CHECK(typo.code == 2);
        CHECK(typo.err.find("did you mean 'zeno'") != std::string::npos);
        CHECK(suggest_subcommand("rate") == "rates");
        CHECK(suggest_subcommand("completely-different").empty());
    }

    TEST_CASE("all nine subcommands are listed with descriptions")
    {
        std::set<std::string> names;
        for (const auto& s : subcommands()) {
            names.insert(s.name);
            CHECK_FALSE(s.description.empty());
            CHECK_FALSE(s.topic.empty());
        }
        CHECK(names == std::set<std::string>{"zeno", "chain", "pointer2", "regimes", "spatial",
                                             "table1", "ratio", "ifm", "rates"});
    }

    TEST_CASE("zeno measurements output")
    {
        const Run r = run({"zeno", "--t", "1", "--n", "10"});
        REQUIRE(r.code == 0);
        CHECK(first_line(r.out) == "n,p_n,zeno_approx");
        CHECK(r.out.find("10,0.9046") != std::string::npos);
    }

    TEST_CASE("bad values exit 2 and name the key")
    {
        const Run r = run({"zeno", "--v", "abc"});
        CHECK(r.code == 2);
        CHECK(r.err.find("'v'") != std::string::npos);
        CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

        CHECK(run({"zeno", "--n", "0"}).code == 2);
        CHECK(run({"zeno", "--mode", "bogus"}).code == 2);
        CHECK(run({"zeno", "--format", "xml"}).code == 2);
        CHECK(run({"zeno", "--nonexistent", "1"}).code == 2);
        CHECK(run({"regimes", "--preset", "lumpy"}).code == 2);
        CHECK(run({"table1", "--environments", "/no/such/file.json"}).code == 2);
    }

    TEST_CASE("sweep validation")
    {
        CHECK(run({"zeno", "--sweep", "n=1:10:1"}).code == 2);
        CHECK(run({"zeno", "--sweep", "n=0:10:3:log"}).code == 2);
        CHECK(run({"zeno", "--sweep", "n1:10:3"}).code == 2);
        CHECK(run({"zeno", "--sweep", "mode=1:2:3"}).code == 2);
        CHECK(run({"zeno", "--sweep", "q=1:2:3"}).code == 2);
        CHECK(run({"zeno", "--mode", "onset", "--sweep", "t=1:2:3"}).code == 2);
        const Run ok = run({"zeno", "--sweep", "n=1:3:3:lin"});
        CHECK(ok.code == 0);
        CHECK(std::count(ok.out.begin(), ok.out.end(), '\n') == 4);
    }

    TEST_CASE("integer sweeps are rounded and deduplicated")
    {
        const Run r = run({"zeno", "--sweep", "n=1:3:7"});
        REQUIRE(r.code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);  // header + 1, 2, 3
    }

    TEST_CASE("sweeps are emitted in sweep order and match sequential mode")
    {
        const Run par = run({"zeno", "--sweep", "n=1:200:12:log"});
        const Run seq = run({"zeno", "--sweep", "n=1:200:12:log", "--sequential"});
        REQUIRE(par.code == 0);
        CHECK(par.out == seq.out);
        const Run desc = run({"zeno", "--sweep", "n=200:1:12:log", "--sequential"});
        CHECK(desc.out == seq.out);
    }

    TEST_CASE("flags override the config file, which overrides defaults")
    {
        const fs::path dir = scratch_dir("config");
        write(dir / "cfg.json", R"({"t": 2, "n": 3, "format": "json"})");
        const Run from_file = run({"zeno", "--config", (dir / "cfg.json").string()});
        REQUIRE(from_file.code == 0);
        const auto j = nlohmann::json::parse(from_file.out);
        CHECK(j.dump().find("\"n\"") != std::string::npos);
        const Run flags_only = run({"zeno", "--t", "2", "--n", "3", "--format", "json"});
        CHECK(from_file.out == flags_only.out);

        const Run overridden = run({"zeno", "--config", (dir / "cfg.json").string(), "--t", "1",
                                    "--format", "csv"});
        const Run direct = run({"zeno", "--t", "1", "--n", "3"});
        CHECK(overridden.out == direct.out);

        write(dir / "bad.json", "{not json");
        CHECK(run({"zeno", "--config", (dir / "bad.json").string()}).code == 2);
        write(dir / "unknown.json", R"({"warp": 9})");
        const Run unknown = run({"zeno", "--config", (dir / "unknown.json").string()});
        CHECK(unknown.code == 2);
        CHECK(unknown.err.find("warp") != std::string::npos);
        fs::remove_all(dir);
    }

    TEST_CASE("--out writes the file atomically and leaves nothing else behind")
    {
        const fs::path dir = scratch_dir("out");
        const fs::path target = dir / "p.csv";
        const Run r = run({"ifm", "--n", "5", "--out", target.string()});
        CHECK(r.code == 0);
        CHECK(r.out.empty());
        CHECK(golden::read_text(target.string()) == run({"ifm", "--n", "5"}).out);
        CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
        // Failing runs do not clobber an existing file.
        CHECK(run({"ifm", "--n", "0", "--out", target.string()}).code == 2);
        CHECK(golden::read_text(target.string()) == run({"ifm", "--n", "5"}).out);
        fs::remove_all(dir);
    }

    TEST_CASE("JSON documents")
    {
        const Run two = run({"chain", "--mode", "two-step", "--format", "json"});
        REQUIRE(two.code == 0);
        CHECK(nlohmann::json::parse(two.out).contains("amplitudes"));
        const Run contrast = run({"rates", "--mode", "contrast", "--format", "json"});
        REQUIRE(contrast.code == 0);
        CHECK(nlohmann::json::parse(contrast.out).contains("von_neumann_rates"));
        const Run table = run({"ifm", "--format", "json"});
        REQUIRE(table.code == 0);
        CHECK(nlohmann::json::parse(table.out).is_structured());
    }

    TEST_CASE("numerical failures exit 3")
    {
        const Run r = run({"spatial", "--n", "32", "--length", "8", "--t", "5", "--dt", "0.5"});
        CHECK(r.code == 3);
        CHECK(r.err.find("error") != std::string::npos);
    }

    TEST_CASE("every module operation is reachable from a subcommand")
    {
        const std::set<std::string> required{
            "herm_propagator", "expectation", "partial_trace", "survival_probability",
            "energy_variance", "short_time_prediction", "repeated_measurement_survival",
            "exponential_survival", "apply_dephasing", "two_step_chain", "entangle_measurement",
            "diagonal_freeze_rate", "n_step_measured_chain", "two_state_transition",
            "two_state_rate_regime", "transition_probability_alpha_e",
            "transition_probability_alpha", "golden_rule_rate", "regime_scan", "localization_rate",
            "decoherence_timescales", "decoherence_relaxation_ratio", "evolve_master", "moments",
            "run_ifm", "ifm_sweep", "solve_rate_equation", "pauli_equation_step",
            "freeze_contrast", "run_subcommand", "list_scenarios"};
        std::set<std::string> covered;
        for (const auto& c : operation_coverage()) {
            covered.insert(c.operation);
            if (c.subcommand.empty()) continue;  // reached through the usage text
            const auto it = std::find_if(subcommands().begin(), subcommands().end(),
                                         [&](const SubcommandInfo& s) { return s.name == c.subcommand; });
            REQUIRE(it != subcommands().end());
            if (!c.mode.empty()) {
                const auto mode = std::find_if(it->params.begin(), it->params.end(),
                                               [](const ParamSpec& p) { return p.name == "mode"; });
                REQUIRE(mode != it->params.end());
                CHECK(std::find(mode->choices.begin(), mode->choices.end(), c.mode) !=
                      mode->choices.end());
            }
        }
        for (const auto& op : required) {
            INFO(op);
            CHECK(covered.count(op) == 1);
        }
    }

    TEST_CASE("every subcommand mode runs with defaults")
    {
        for (const auto& s : subcommands()) {
            const auto mode = std::find_if(s.params.begin(), s.params.end(),
                                           [](const ParamSpec& p) { return p.name == "mode"; });
            std::vector<std::string> modes{""};
            if (mode != s.params.end()) modes = mode->choices;
            for (const auto& m : modes) {
                std::vector<std::string> args{s.name};
                if (!m.empty()) args.insert(args.end(), {"--mode", m});
                if (s.name == "spatial") args.insert(args.end(), {"--n", "32", "--t", "0.05"});
                if (s.name == "ifm" && m == "montecarlo") args.insert(args.end(), {"--trials", "1000"});
                const Run r = run(args);
                INFO(s.name << " " << m << ": " << r.err);
                CHECK(r.code == 0);
                CHECK_FALSE(r.out.empty());
            }
        }
    }

    TEST_CASE("golden files reproduce byte for byte")
    {
        for (const auto& c : golden::load_manifest()) {
            const golden::Outcome o = golden::check_case(c);
            INFO(o.name << ": " << o.detail);
            CHECK(o.matched);
        }
    }
}
