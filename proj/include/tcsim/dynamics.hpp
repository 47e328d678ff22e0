#pragma once

#include "tcsim/fockspace.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tcsim {

/// Thrown when the fixed-step integrator detects trace drift beyond 1e-6;
/// the harness maps it to exit code 3.
struct NumericalInstability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajectoryConfig {
    double d_tau = 0.01;          // step in tau = gamma t
    double tau_end = 100.0;
    std::uint64_t master_seed = 0x7c5d1e5u;
    int n_trajectories = 2000;
    int record_stride = 100;
};

/// H = zeta (ax ay az - xi) s+ + H.c. on the chosen space. On the ladder the
/// couplings are <e, n-1|H|g, n> = zeta sqrt((n+q)(n+p)n) plus the on-site
/// -zeta xi between (e, n) and (g, n).
SparseOperator build_hamiltonian(Complex zeta, Complex xi, const BasisLayout& layout);
SparseOperator build_hamiltonian(Complex zeta, Complex xi, const LadderLayout& ladder);

/// d rho / d tau with the single decay channel sqrt(gamma) s-. Time variable
/// is tau = gamma t for gamma > 0; for gamma = 0 the rhs is the bare
/// commutator in plain time (unitary limit).
Matrix lindblad_rhs(const Matrix& rho, const SparseOperator& H, const SparseOperator& sminus,
                    double gamma);

/// Recorder callbacks return false to stop the integration early.
using DensityRecorder = std::function<bool(double tau, const Matrix& rho)>;
using PureRecorder = std::function<bool(double tau, const Vector& psi)>;

struct LindbladStatus {
    double max_trace_drift = 0.0;
    double tau_reached = 0.0;
};

/// Classical fixed-step 4th-order integration of the master equation,
/// starting at tau0. rho is advanced in place; the recorder fires at tau0
/// and then every record_stride steps. Trace drift is monitored and
/// reported, never silently corrected; drift above 1e-6 throws
/// NumericalInstability.
LindbladStatus integrate_lindblad(Matrix& rho, const SparseOperator& H,
                                  const SparseOperator& sminus, double gamma,
                                  const TrajectoryConfig& cfg, const DensityRecorder& record,
                                  double tau0 = 0.0);

/// Per-trajectory seed: splitmix64 avalanche of (master_seed, index).
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t trajectory_index);

/// Single quantum-trajectory unraveling: RK4 under
/// H_eff = H - (i gamma / 2) s+ s- with waiting-time jumps (jump fires when
/// the decaying squared norm crosses a uniform draw). Recorded snapshots are
/// renormalized copies. Jump times (in tau) are appended to jump_log when
/// given.
void mcwf_trajectory(Vector psi0, const SparseOperator& H, const SparseOperator& sminus,
                     double gamma, const TrajectoryConfig& cfg,
                     std::uint64_t trajectory_index, const PureRecorder& record,
                     std::vector<double>* jump_log = nullptr);

/// Per-snapshot observable extractor; must return the same number of values
/// for every snapshot.
using SnapshotEvaluator = std::function<std::vector<double>(const Vector&)>;

struct EnsembleResult {
    std::vector<double> tau;
    Eigen::MatrixXd mean;       // n_records x n_observables
    Eigen::MatrixXd std_error;  // same shape; sample standard error of the mean
    long total_jumps = 0;
};

/// Independent trajectories with seeds mix_seed(master_seed, index); the
/// reduction runs in trajectory-index order, so the result is
/// bit-reproducible regardless of thread schedule.
EnsembleResult run_ensemble(const Vector& psi0, const SparseOperator& H,
                            const SparseOperator& sminus, double gamma,
                            const TrajectoryConfig& cfg, const SnapshotEvaluator& observables,
                            int n_threads = 0);

struct SteadyStateResiduals {
    double trilinear = 0.0;
    double charge_p = 0.0;
    double charge_q = 0.0;
};

/// Residuals of the dark-state defining relations on the vibrational part
/// conditioned on the ion ground level.
SteadyStateResiduals steady_state_residual(const Vector& psi, const LadderLayout& ladder,
                                           Complex xi);
SteadyStateResiduals steady_state_residual(const Matrix& rho, const LadderLayout& ladder,
                                           Complex xi);
SteadyStateResiduals steady_state_residual(const Vector& psi, const BasisLayout& basis,
                                           Complex xi, int p, int q);

}  // namespace tcsim
