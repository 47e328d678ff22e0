#include "tcsim/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace {

// Default grids for the sweep subcommands; override by passing values.
const std::vector<double> kDefaultAlphaGrid = {0.005, 0.01,  0.015, 0.02, 0.025,
                                               0.03,  0.035, 0.04,  0.045, 0.05};
const std::vector<double> kDefaultXiGrid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};

struct Cli {
    std::string config_path;
    std::string engine;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool no_timestamp = false;

    tcsim::RunConfig resolve() const {
        tcsim::RunConfig cfg =
            config_path.empty() ? tcsim::RunConfig{} : tcsim::load_config(config_path);
        if (seed_set) cfg.master_seed = seed;
        if (!engine.empty()) tcsim::apply_config_key(cfg, "run", "engine", engine);
        if (!out.empty()) cfg.out_path = out;
        if (no_timestamp) cfg.timestamp = false;
        cfg.validate();
        return cfg;
    }
};

void add_common(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.config_path, "structured key-value config file");
    sub->add_option("--seed", cli.seed, "master seed for the trajectory ensemble")
        ->each([&](const std::string&) { cli.seed_set = true; });
    sub->add_option("--engine", cli.engine, "lindblad|mcwf|both");
    sub->add_option("--out", cli.out, "output file (default: output dir or stdout)");
    sub->add_flag("--no-timestamp", cli.no_timestamp,
                  "suppress the generated-at header line");
}

int dispatch(const tcsim::RunConfig& cfg, const std::string& default_name,
             const std::function<int(std::ostream&)>& run) {
    const std::string path = tcsim::resolve_out_path(cfg, default_name);
    if (path.empty()) return run(std::cout);
    std::ofstream os(path);
    if (!os) throw tcsim::ConfigError("cannot open output file: " + path);
    return run(os);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trapped-ion trio-coherent-state generation simulator"};
    app.set_version_flag("--version", std::string("tcsim v") + tcsim::kVersion);
    app.require_subcommand(1);

    Cli cli;
    std::vector<double> alphas, xis;

    CLI::App* coeffs = app.add_subcommand("coeffs", "target-state ladder coefficients");
    CLI::App* simulate = app.add_subcommand("simulate", "time evolution of the default observables");
    CLI::App* fid = app.add_subcommand("fidelity", "F(tau) columns for an alpha list");
    CLI::App* sweep = app.add_subcommand("sweep-alpha", "generation time over an alpha grid");
    CLI::App* cmp = app.add_subcommand("compare-schemes",
                                       "generation times at alpha vs the mapped alpha");
    CLI::App* verify = app.add_subcommand("verify", "invariant and reduction checks");
    for (CLI::App* sub : {coeffs, simulate, fid, sweep, cmp, verify}) add_common(sub, cli);
    fid->add_option("alphas", alphas, "drive-to-decay ratios, one F column each");
    sweep->add_option("alphas", alphas, "alpha grid (default 0.005..0.05)");
    cmp->add_option("xis", xis, "xi grid (default 0.5..4.0)");

    CLI11_PARSE(app, argc, argv);

    try {
        tcsim::RunConfig cfg = cli.resolve();
        if (coeffs->parsed())
            return dispatch(cfg, "coeffs.csv",
                            [&](std::ostream& os) { return tcsim::cmd_coeffs(cfg, os); });
        if (simulate->parsed())
            return dispatch(cfg, "simulate.csv",
                            [&](std::ostream& os) { return tcsim::cmd_simulate(cfg, os); });
        if (fid->parsed()) {
            if (alphas.empty()) alphas = {cfg.alpha};
            return dispatch(cfg, "fidelity.csv", [&](std::ostream& os) {
                return tcsim::cmd_fidelity(cfg, alphas, os);
            });
        }
        if (sweep->parsed()) {
            if (alphas.empty()) alphas = kDefaultAlphaGrid;
            return dispatch(cfg, "sweep_alpha.csv", [&](std::ostream& os) {
                return tcsim::cmd_sweep_alpha(cfg, alphas, os);
            });
        }
        if (cmp->parsed()) {
            if (xis.empty()) xis = kDefaultXiGrid;
            return dispatch(cfg, "compare_schemes.csv", [&](std::ostream& os) {
                return tcsim::cmd_compare_schemes(cfg, xis, os);
            });
        }
        return dispatch(cfg, "verify.txt",
                        [&](std::ostream& os) { return tcsim::cmd_verify(cfg, os); });
    } catch (const tcsim::ConfigError& e) {
        std::cerr << "tcsim: config error: " << e.what() << "\n";
        return 2;
    } catch (const tcsim::NumericalInstability& e) {
        std::cerr << "tcsim: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "tcsim: config error: " << e.what() << "\n";
        return 2;
    }
}
