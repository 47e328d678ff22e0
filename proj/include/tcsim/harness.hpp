#pragma once

#include "tcsim/dynamics.hpp"
#include "tcsim/laser_config.hpp"
#include "tcsim/observables.hpp"
#include "tcsim/tcs_state.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tcsim {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Engine { Lindblad, Mcwf, Both };
enum class Space { Ladder, Full };

struct RunConfig {
    Complex xi{2.0, 0.0};
    int p = 3, q = 2;
    int k = 4;               // initial ladder offset: |e>|q+k>|p+k>|k>
    double alpha = 0.02;     // |zeta| / gamma
    int n_max = 10;
    Engine engine = Engine::Lindblad;
    Space space = Space::Ladder;
    double d_tau = 0.01;
    double tau_end = -1.0;   // < 0: auto, 400 / alpha
    int n_trajectories = 2000;
    int record_stride = 100;
    std::uint64_t master_seed = 20260823ULL;

    IonParams ion;           // [lasers] eta, gamma (delta, nu are metadata)
    SignPattern signs;
    std::optional<std::array<double, 5>> rabi;   // explicit drive, metadata/verify
    std::optional<std::array<double, 5>> phase;

    std::string out_path;    // --out; empty means out_dir or stdout
    std::string out_dir;     // [output] dir or TCSIM_OUT_DIR
    bool timestamp = true;

    double resolved_tau_end() const { return tau_end > 0.0 ? tau_end : 400.0 / alpha; }
    Complex zeta() const { return Complex(alpha * ion.gamma, 0.0); }

    void validate() const;  // throws ConfigError
};

RunConfig load_config(const std::string& path);
void apply_config_key(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value);

/// '# config:' echo line and its inverse; the echo round-trips to a
/// RunConfig that reproduces the run.
std::string config_echo(const RunConfig& cfg);
RunConfig parse_config_echo(const std::string& line);

std::string format_double(double x);  // %.17g, lossless round-trip

/// Everything a run needs on its compute space: operators, initial state,
/// embedded dark target and the tracked ladder triples.
struct SimSpace {
    Space kind = Space::Ladder;
    LadderLayout ladder{};
    BasisLayout basis{0};
    SparseOperator hamiltonian;
    SparseOperator decay_op;  // sigma-
    Vector dark;
    TcsVector target;
    std::vector<std::array<int, 3>> tracked;   // triples (l, m, n), rungs 0..min(6, n_max)
    std::vector<std::pair<int, int>> tracked_idx;  // (ground, excited) state indices

    int dim() const;
    Vector initial_state(int k) const;  // |e>|q+k>|p+k>|k>
};

SimSpace make_space(const RunConfig& cfg);

ObservableSeries run_lindblad_series(const SimSpace& space, const RunConfig& cfg);
ObservableSeries run_mcwf_series(const SimSpace& space, const RunConfig& cfg);

/// Lindblad integration with early stop once 1 - F <= threshold, then
/// bisection re-integration from the bracketing checkpoint.
GenerationTime solve_generation_time(const SimSpace& space, const RunConfig& cfg,
                                     double threshold = 1e-5);

// Subcommands; each writes CSV (or a text report for verify) and returns the
// process exit code: 0 ok, 1 verification failure, 2 config error,
// 3 numerical instability.
int cmd_coeffs(const RunConfig& cfg, std::ostream& os);
int cmd_simulate(const RunConfig& cfg, std::ostream& os);
int cmd_fidelity(const RunConfig& cfg, const std::vector<double>& alphas, std::ostream& os);
int cmd_sweep_alpha(const RunConfig& cfg, const std::vector<double>& alphas,
                    std::ostream& os);
int cmd_compare_schemes(const RunConfig& cfg, const std::vector<double>& xis,
                        std::ostream& os);
int cmd_verify(const RunConfig& cfg, std::ostream& os);

/// Output target: --out wins, then out_dir/<name>, then stdout ("").
std::string resolve_out_path(const RunConfig& cfg, const std::string& default_name);

}  // namespace tcsim
