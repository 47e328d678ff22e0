#pragma once

#include "tcsim/fockspace.hpp"

#include <functional>
#include <vector>

namespace tcsim {

/// Tau-indexed record of the reported quantities. probs rows follow the
/// tracked-triple list chosen by the caller (the ladder rungs, usually).
struct ObservableSeries {
    std::vector<double> tau;
    std::vector<double> sigma_z;
    std::vector<double> fidelity;
    std::vector<std::vector<double>> probs;
    std::vector<double> sigma_z_se;    // empty unless ensemble-averaged
    std::vector<double> fidelity_se;
};

/// P(n) = |G_n|^2 + |E_n|^2 per ladder rung (both layouts store the ground
/// block first, so the ion trace is a head/tail split).
Eigen::VectorXd fock_probabilities(const Vector& psi, const LadderLayout& ladder);
Eigen::VectorXd fock_probabilities(const Matrix& rho, const LadderLayout& ladder);

/// P(l, m, n) over the whole vibrational space, indexed by flatten_vib.
Eigen::VectorXd fock_probabilities(const Vector& psi, const BasisLayout& basis);
Eigen::VectorXd fock_probabilities(const Matrix& rho, const BasisLayout& basis);

/// <sigma_z> = sum (|E|^2 - |G|^2); states carry the ground block first.
double inversion(const Vector& psi);
double inversion(const Matrix& rho);

/// F = |<dark|psi>|^2 against the embedded |g> (x) |xi,p,q> target; for a
/// density state the diagonal expectation <dark|rho|dark>.
double fidelity(const Vector& psi, const Vector& dark_target);
double fidelity(const Matrix& rho, const Vector& dark_target);

struct GenerationTime {
    bool converged = false;
    double tau_s = 0.0;
    double max_fidelity = 0.0;
};

/// Re-evaluates F(tau) between the bracketing samples; typically backed by
/// re-integration from a checkpoint.
using FidelityRefiner = std::function<double(double tau)>;

/// First tau with 1 - F <= threshold: scan the recorded samples, then refine
/// the bracket by bisection (log-linear interpolation seeds the first probe)
/// to relative accuracy rel_acc. Without a refiner the upper bracket sample
/// is returned. Never converged -> reports the maximum F attained.
GenerationTime generation_time(const std::vector<double>& tau,
                               const std::vector<double>& fidelity_series,
                               double threshold = 1e-5,
                               const FidelityRefiner& refine = nullptr,
                               double rel_acc = 1e-3);

}  // namespace tcsim
