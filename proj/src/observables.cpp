#include "tcsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcsim {

Eigen::VectorXd fock_probabilities(const Vector& psi, const LadderLayout& ladder) {
    const int r = ladder.rungs();
    Eigen::VectorXd p(r);
    for (int n = 0; n < r; ++n)
        p[n] = std::norm(psi[ladder.index(Ion::Ground, n)]) +
               std::norm(psi[ladder.index(Ion::Excited, n)]);
    return p;
}

Eigen::VectorXd fock_probabilities(const Matrix& rho, const LadderLayout& ladder) {
    const int r = ladder.rungs();
    Eigen::VectorXd p(r);
    for (int n = 0; n < r; ++n)
        p[n] = rho(ladder.index(Ion::Ground, n), ladder.index(Ion::Ground, n)).real() +
               rho(ladder.index(Ion::Excited, n), ladder.index(Ion::Excited, n)).real();
    return p;
}

Eigen::VectorXd fock_probabilities(const Vector& psi, const BasisLayout& basis) {
    const int dv = basis.dim_vib();
    Eigen::VectorXd p(dv);
    for (int v = 0; v < dv; ++v)
        p[v] = std::norm(psi[v]) + std::norm(psi[v + dv]);
    return p;
}

Eigen::VectorXd fock_probabilities(const Matrix& rho, const BasisLayout& basis) {
    const int dv = basis.dim_vib();
    Eigen::VectorXd p(dv);
    for (int v = 0; v < dv; ++v)
        p[v] = rho(v, v).real() + rho(v + dv, v + dv).real();
    return p;
}

double inversion(const Vector& psi) {
    const long half = psi.size() / 2;
    return psi.tail(half).squaredNorm() - psi.head(half).squaredNorm();
}

double inversion(const Matrix& rho) {
    const long half = rho.rows() / 2;
    double s = 0.0;
    for (long i = 0; i < half; ++i)
        s += rho(i + half, i + half).real() - rho(i, i).real();
    return s;
}

double fidelity(const Vector& psi, const Vector& dark_target) {
    if (psi.size() != dark_target.size())
        throw std::invalid_argument("fidelity: layout mismatch");
    return std::norm(dark_target.dot(psi));
}

double fidelity(const Matrix& rho, const Vector& dark_target) {
    if (rho.rows() != dark_target.size())
        throw std::invalid_argument("fidelity: layout mismatch");
    return std::real(dark_target.dot(rho * dark_target));
}

GenerationTime generation_time(const std::vector<double>& tau,
                               const std::vector<double>& fidelity_series,
                               double threshold, const FidelityRefiner& refine,
                               double rel_acc) {
    if (tau.size() != fidelity_series.size() || tau.empty())
        throw std::invalid_argument("generation_time: empty or mismatched series");

    GenerationTime out;
    std::size_t cross = tau.size();
    for (std::size_t i = 0; i < tau.size(); ++i) {
        out.max_fidelity = std::max(out.max_fidelity, fidelity_series[i]);
        if (cross == tau.size() && 1.0 - fidelity_series[i] <= threshold) cross = i;
    }
    if (cross == tau.size()) return out;  // never met: not converged

    out.converged = true;
    if (cross == 0) {
        out.tau_s = tau[0];
        return out;
    }

    double a = tau[cross - 1], b = tau[cross];
    if (refine) {
        // log(1 - F) interpolation seeds the first probe
        const double da = std::max(1.0 - fidelity_series[cross - 1], 1e-300);
        const double db = std::max(1.0 - fidelity_series[cross], 1e-300);
        double probe = a + (b - a) * (std::log(da) - std::log(threshold)) /
                               (std::log(da) - std::log(db));
        probe = std::clamp(probe, a, b);
        while (b - a > rel_acc * std::max(b, 1.0)) {
            const double f = refine(probe);
            (1.0 - f <= threshold ? b : a) = probe;
            probe = 0.5 * (a + b);
        }
    }
    out.tau_s = b;
    return out;
}

}  // namespace tcsim
