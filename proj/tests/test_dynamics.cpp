#include <doctest.h>

#include "tcsim/dynamics.hpp"
#include "tcsim/observables.hpp"
#include "tcsim/tcs_state.hpp"

#include <cmath>
#include <set>

using namespace tcsim;

namespace {

// Undriven two-level system: LadderLayout(0, 0, 0) is exactly {|g,000>, |e,000>}.
struct TwoLevel {
    LadderLayout lad = build_ladder(0, 0, 0);
    SparseOperator H = build_hamiltonian(Complex(0.0, 0.0), Complex(0.0, 0.0), lad);
    SparseOperator sm = sigma_minus(lad);
    Vector excited() const {
        Vector v = Vector::Zero(2);
        v[lad.index(Ion::Excited, 0)] = 1.0;
        return v;
    }
};

}  // namespace

TEST_CASE("spontaneous decay matches 2 e^{-tau} - 1 analytically") {
    TwoLevel tl;
    Matrix rho = tl.excited() * tl.excited().adjoint();
    TrajectoryConfig cfg;
    cfg.tau_end = 5.0;
    cfg.record_stride = 50;
    double worst = 0.0;
    integrate_lindblad(rho, tl.H, tl.sm, 1.0, cfg, [&](double tau, const Matrix& r) {
        worst = std::max(worst, std::abs(inversion(r) - (2.0 * std::exp(-tau) - 1.0)));
        return true;
    });
    CHECK(worst < 1e-9);  // RK4 at h = 0.01
}

TEST_CASE("gamma = 0 evolution is unitary: trace, purity, energy conserved") {
    LadderLayout lad = build_ladder(3, 2, 8);
    SparseOperator H = build_hamiltonian(Complex(0.05, 0.0), Complex(2.0, 0.0), lad);
    SparseOperator sm = sigma_minus(lad);
    Vector psi0 = Vector::Zero(lad.dim());
    psi0[lad.index(Ion::Excited, 3)] = 1.0;
    Matrix rho = psi0 * psi0.adjoint();
    TrajectoryConfig cfg;
    cfg.tau_end = 50.0;
    integrate_lindblad(rho, H, sm, 0.0, cfg, nullptr);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-9);
}

TEST_CASE("the dark state is stationary under the full dissipative dynamics") {
    LadderLayout lad = build_ladder(3, 2, 10);
    const Complex xi(2.0, 0.0);
    SparseOperator H = build_hamiltonian(Complex(0.02, 0.0), xi, lad);
    SparseOperator sm = sigma_minus(lad);
    TcsVector v = tcs_fock(TcsParams(xi, 3, 2), 10);
    Vector dark = dark_state(v, lad);
    dark.normalize();
    Matrix rho = dark * dark.adjoint();
    TrajectoryConfig cfg;
    cfg.tau_end = 50.0;
    integrate_lindblad(rho, H, sm, 1.0, cfg, nullptr);
    CHECK(fidelity(rho, dark) > 1.0 - 1e-8);

    SteadyStateResiduals res = steady_state_residual(rho, lad, xi);
    CHECK(res.trilinear < 1e-7);
    CHECK(res.charge_p < 1e-12);
    CHECK(res.charge_q < 1e-12);
}

TEST_CASE("runaway step size is reported, not silently corrected") {
    LadderLayout lad = build_ladder(3, 2, 10);
    SparseOperator H = build_hamiltonian(Complex(80.0, 0.0), Complex(2.0, 0.0), lad);
    Matrix rho = Matrix::Zero(lad.dim(), lad.dim());
    rho(lad.index(Ion::Excited, 9), lad.index(Ion::Excited, 9)) = 1.0;
    TrajectoryConfig cfg;
    cfg.d_tau = 0.1;  // way beyond the stability limit for |zeta| = 80
    cfg.tau_end = 50.0;
    CHECK_THROWS_AS(
        integrate_lindblad(rho, H, sigma_minus(lad), 1.0, cfg, nullptr),
        NumericalInstability);
}

TEST_CASE("seed mixing: deterministic, index-sensitive, well-spread") {
    CHECK(mix_seed(1, 0) == mix_seed(1, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(mix_seed(20260823ULL, i));
    CHECK(seen.size() == 1000);
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}

TEST_CASE("mcwf with gamma = 0 reduces to deterministic Schrodinger evolution") {
    LadderLayout lad = build_ladder(3, 2, 8);
    SparseOperator H = build_hamiltonian(Complex(0.05, 0.0), Complex(2.0, 0.0), lad);
    SparseOperator sm = sigma_minus(lad);
    Vector psi0 = Vector::Zero(lad.dim());
    psi0[lad.index(Ion::Excited, 2)] = 1.0;
    Matrix rho = psi0 * psi0.adjoint();
    TrajectoryConfig cfg;
    cfg.tau_end = 20.0;

    std::vector<Matrix> snaps;
    integrate_lindblad(rho, H, sm, 0.0, cfg, [&](double, const Matrix& r) {
        snaps.push_back(r);
        return true;
    });
    std::size_t i = 0;
    double worst = 0.0;
    std::vector<double> jumps;
    mcwf_trajectory(psi0, H, sm, 0.0, cfg, 7,
                    [&](double, const Vector& psi) {
                        const Complex overlap = psi.dot(snaps[i] * psi);
                        worst = std::max(worst, std::abs(1.0 - overlap.real()));
                        ++i;
                        return true;
                    },
                    &jumps);
    CHECK(i == snaps.size());
    CHECK(worst < 1e-9);
    CHECK(jumps.empty());
}

TEST_CASE("two-level mcwf ensemble: one jump per trajectory, mean matches decay law") {
    TwoLevel tl;
    TrajectoryConfig cfg;
    cfg.tau_end = 8.0;
    cfg.n_trajectories = 500;
    cfg.record_stride = 100;
    SnapshotEvaluator eval = [](const Vector& psi) {
        return std::vector<double>{inversion(psi)};
    };
    EnsembleResult res = run_ensemble(tl.excited(), tl.H, tl.sm, 1.0, cfg, eval);
    CHECK(res.total_jumps == cfg.n_trajectories);  // H = 0: exactly one decay each
    for (std::size_t i = 1; i < res.tau.size(); ++i) {
        // survivors are Bernoulli(e^{-tau}); when none survive, the sample SE
        // collapses to zero, so the theoretical binomial width is the floor
        const double p_surv = std::exp(-res.tau[i]);
        const double exact = 2.0 * p_surv - 1.0;
        const double width = std::max(
            res.std_error(i, 0),
            2.0 * std::sqrt(p_surv * (1.0 - p_surv) / cfg.n_trajectories));
        CHECK(std::abs(res.mean(i, 0) - exact) <= 4.0 * width + 1e-12);
    }
}

TEST_CASE("ensemble reduction is bit-identical across repeats and thread counts") {
    LadderLayout lad = build_ladder(1, 1, 4);
    SparseOperator H = build_hamiltonian(Complex(0.1, 0.0), Complex(1.0, 0.0), lad);
    SparseOperator sm = sigma_minus(lad);
    Vector psi0 = Vector::Zero(lad.dim());
    psi0[lad.index(Ion::Excited, 2)] = 1.0;
    TrajectoryConfig cfg;
    cfg.tau_end = 10.0;
    cfg.n_trajectories = 64;
    SnapshotEvaluator eval = [](const Vector& psi) {
        return std::vector<double>{inversion(psi), std::norm(psi[0])};
    };
    EnsembleResult a = run_ensemble(psi0, H, sm, 1.0, cfg, eval, 1);
    EnsembleResult b = run_ensemble(psi0, H, sm, 1.0, cfg, eval, 4);
    CHECK(a.total_jumps == b.total_jumps);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.std_error - b.std_error).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standard error shrinks as 1/sqrt(M)") {
    TwoLevel tl;
    TrajectoryConfig cfg;
    cfg.tau_end = 2.0;
    cfg.record_stride = 200;
    SnapshotEvaluator eval = [](const Vector& psi) {
        return std::vector<double>{inversion(psi)};
    };
    cfg.n_trajectories = 400;
    EnsembleResult small = run_ensemble(tl.excited(), tl.H, tl.sm, 1.0, cfg, eval);
    cfg.n_trajectories = 1600;
    EnsembleResult big = run_ensemble(tl.excited(), tl.H, tl.sm, 1.0, cfg, eval);
    const long last = small.mean.rows() - 1;
    const double ratio = small.std_error(last, 0) / big.std_error(last, 0);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("ladder and full-space Hamiltonians share the coupling structure") {
    const Complex zeta(0.02, 0.0), xi(2.0, 0.0);
    LadderLayout lad = build_ladder(3, 2, 2);
    BasisLayout basis(5);
    SparseOperator hl = build_hamiltonian(zeta, xi, lad);
    SparseOperator hf = build_hamiltonian(zeta, xi, basis);
    CHECK(hl.is_hermitian());
    CHECK(hf.is_hermitian());
    // same matrix element between embedded ladder states
    Vector g1 = Vector::Zero(lad.dim()), e0 = Vector::Zero(lad.dim());
    g1[lad.index(Ion::Ground, 1)] = 1.0;
    e0[lad.index(Ion::Excited, 0)] = 1.0;
    const Complex elem_l = e0.dot(hl.apply(g1));
    Vector G1 = Vector::Zero(basis.dim_total()), E0 = Vector::Zero(basis.dim_total());
    G1[basis.flatten(Ion::Ground, 3, 4, 1)] = 1.0;
    E0[basis.flatten(Ion::Excited, 2, 3, 0)] = 1.0;
    CHECK(std::abs(elem_l - E0.dot(hf.apply(G1))) < 1e-15);
    CHECK(std::abs(elem_l - zeta * std::sqrt(3.0 * 4.0 * 1.0)) < 1e-15);
}
