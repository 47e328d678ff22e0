#include "tcsim/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace tcsim {

SparseOperator build_hamiltonian(Complex zeta, Complex xi, const BasisLayout& layout) {
    SparseOperator sp = sigma_plus(layout);
    SparseOperator half =
        (trilinear(layout) * sp).scaled(zeta) - sp.scaled(zeta * xi);
    return half + half.adjoint();
}

SparseOperator build_hamiltonian(Complex zeta, Complex xi, const LadderLayout& ladder) {
    std::vector<Triplet> t;
    for (int n = 0; n <= ladder.n_max; ++n) {
        const int g = ladder.index(Ion::Ground, n);
        const int e = ladder.index(Ion::Excited, n);
        const Complex onsite = -zeta * xi;
        if (onsite != Complex(0.0, 0.0)) {
            t.push_back({e, g, onsite});
            t.push_back({g, e, std::conj(onsite)});
        }
        if (n >= 1) {
            const double c =
                std::sqrt((n + double(ladder.q)) * (n + double(ladder.p)) * double(n));
            const int e_below = ladder.index(Ion::Excited, n - 1);
            t.push_back({e_below, g, zeta * c});
            t.push_back({g, e_below, std::conj(zeta * c)});
        }
    }
    return SparseOperator::from_triplets(ladder.dim(), std::move(t));
}

Matrix lindblad_rhs(const Matrix& rho, const SparseOperator& H, const SparseOperator& sminus,
                    double gamma) {
    const double inv = gamma > 0.0 ? 1.0 / gamma : 1.0;
    const double decay = gamma > 0.0 ? 1.0 : 0.0;
    Matrix hrho = H.left_product(rho);
    Matrix out = Complex(0.0, -inv) * (hrho - hrho.adjoint());
    if (decay > 0.0) {
        Matrix jr = sminus.left_product(rho);           // s- rho
        Matrix pe_rho = sminus.adjoint().left_product(jr);  // s+ s- rho
        out += decay * (sminus.adjoint().right_product(jr)  // s- rho s+
                        - 0.5 * (pe_rho + pe_rho.adjoint()));
    }
    return out;
}

namespace {

/// Shared precomputation for the fixed-step kernels: H scaled to the time
/// variable, the jump-pair list of s-, and the diagonal of s+ s-.
struct Kernel {
    int dim = 0;
    double decay = 0.0;
    std::vector<Triplet> hs;
    struct Jump {
        int g, e;
        Complex v;
    };
    std::vector<Jump> jumps;
    std::vector<double> pe;

    Kernel(const SparseOperator& H, const SparseOperator& sminus, double gamma)
        : dim(H.dim()), decay(gamma > 0.0 ? 1.0 : 0.0), pe(H.dim(), 0.0) {
        const double inv = gamma > 0.0 ? 1.0 / gamma : 1.0;
        hs.reserve(H.entries().size());
        for (const Triplet& t : H.entries()) hs.push_back({t.row, t.col, t.value * inv});
        for (const Triplet& t : sminus.entries()) {
            jumps.push_back({t.row, t.col, t.value});
            pe[t.col] += std::norm(t.value);
        }
    }

    // out = -i [Hs, rho] - (decay/2){Pe, rho} + decay s- rho s+
    // Relies on rho hermitian (preserved by every RK4 stage).
    void density_rhs(const Matrix& rho, Matrix& c, Matrix& out) const {
        const int d = dim;
        c.setZero();
        const Complex* r = rho.data();
        Complex* cd = c.data();
        for (const Triplet& t : hs) {
            const Complex v = t.value;
            const Complex* src = r + t.col;
            Complex* dst = cd + t.row;
            for (int col = 0; col < d; ++col) dst[std::size_t(col) * d] += v * src[std::size_t(col) * d];
        }
        Complex* o = out.data();
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                const Complex hc = cd[std::size_t(j) * d + i] -
                                   std::conj(cd[std::size_t(i) * d + j]);
                Complex val = Complex(hc.imag(), -hc.real());  // -i * hc
                if (decay > 0.0)
                    val -= 0.5 * decay * (pe[i] + pe[j]) * r[std::size_t(j) * d + i];
                o[std::size_t(j) * d + i] = val;
            }
        if (decay > 0.0)
            for (const Kernel::Jump& a : jumps)
                for (const Kernel::Jump& b : jumps)
                    o[std::size_t(b.g) * d + a.g] +=
                        decay * a.v * std::conj(b.v) * r[std::size_t(b.e) * d + a.e];
    }

    // y = -i Hs psi - (decay/2) Pe psi
    void pure_rhs(const Vector& psi, Vector& y) const {
        y.setZero();
        const Complex* x = psi.data();
        Complex* o = y.data();
        for (const Triplet& t : hs) o[t.row] += t.value * x[t.col];
        for (int i = 0; i < dim; ++i) {
            const Complex h = o[i];
            o[i] = Complex(h.imag(), -h.real());
            if (decay > 0.0) o[i] -= 0.5 * decay * pe[i] * x[i];
        }
    }

    void apply_jump(Vector& psi, Vector& scratch) const {
        scratch.setZero();
        for (const Jump& j : jumps) scratch[j.g] = j.v * psi[j.e];
        const double n = scratch.norm();
        if (n > 0.0) psi = scratch / n;
    }
};

double next_uniform(std::uint64_t& state) {
    // splitmix64 stream; top 53 bits to a double in [0, 1)
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return double(z >> 11) * 0x1.0p-53;
}

}  // namespace

LindbladStatus integrate_lindblad(Matrix& rho, const SparseOperator& H,
                                  const SparseOperator& sminus, double gamma,
                                  const TrajectoryConfig& cfg, const DensityRecorder& record,
                                  double tau0) {
    if (cfg.d_tau <= 0.0 || cfg.d_tau > 0.1)
        throw std::invalid_argument("integrate_lindblad: d_tau must be in (0, 0.1]");
    const Kernel kernel(H, sminus, gamma);
    const int d = kernel.dim;
    const double h = cfg.d_tau;
    const long steps = std::lround((cfg.tau_end - tau0) / h);

    Matrix c(d, d), k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
    LindbladStatus status;
    status.tau_reached = tau0;

    auto check_and_record = [&](long step) -> bool {
        const double tau = tau0 + step * h;
        status.tau_reached = tau;
        const double drift = std::abs(rho.trace().real() - 1.0);
        status.max_trace_drift = std::max(status.max_trace_drift, drift);
        if (!(drift <= 1e-6))  // negated so a NaN trace also lands here
            throw NumericalInstability(
                "integrate_lindblad: trace drift above 1e-6, reduce d_tau");
        return record ? record(tau, rho) : true;
    };

    if (!check_and_record(0)) return status;
    for (long s = 1; s <= steps; ++s) {
        kernel.density_rhs(rho, c, k1);
        tmp = rho + (0.5 * h) * k1;
        kernel.density_rhs(tmp, c, k2);
        tmp = rho + (0.5 * h) * k2;
        kernel.density_rhs(tmp, c, k3);
        tmp = rho + h * k3;
        kernel.density_rhs(tmp, c, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % cfg.record_stride == 0 || s == steps)
            if (!check_and_record(s)) return status;
    }
    return status;
}

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    std::uint64_t z = master_seed + (trajectory_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void mcwf_trajectory(Vector psi0, const SparseOperator& H, const SparseOperator& sminus,
                     double gamma, const TrajectoryConfig& cfg,
                     std::uint64_t trajectory_index, const PureRecorder& record,
                     std::vector<double>* jump_log) {
    if (cfg.d_tau <= 0.0 || cfg.d_tau > 0.1)
        throw std::invalid_argument("mcwf_trajectory: d_tau must be in (0, 0.1]");
    const Kernel kernel(H, sminus, gamma);
    const int d = kernel.dim;
    const double h = cfg.d_tau;
    const long steps = std::lround(cfg.tau_end / h);

    Vector psi = std::move(psi0);
    Vector k1(d), k2(d), k3(d), k4(d), tmp(d);
    std::uint64_t rng = mix_seed(cfg.master_seed, trajectory_index);

    auto draw = [&]() {
        double u = next_uniform(rng);
        while (u == 0.0) u = next_uniform(rng);
        return u;
    };
    double u = draw();

    auto emit = [&](long step) {
        if (!record) return true;
        tmp = psi / psi.norm();
        return record(step * h, tmp);
    };

    if (!emit(0)) return;
    for (long s = 1; s <= steps; ++s) {
        kernel.pure_rhs(psi, k1);
        tmp = psi + (0.5 * h) * k1;
        kernel.pure_rhs(tmp, k2);
        tmp = psi + (0.5 * h) * k2;
        kernel.pure_rhs(tmp, k3);
        tmp = psi + h * k3;
        kernel.pure_rhs(tmp, k4);
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (psi.squaredNorm() <= u) {
            kernel.apply_jump(psi, tmp);
            if (jump_log) jump_log->push_back(s * h);
            u = draw();
        }
        if (s % cfg.record_stride == 0 || s == steps)
            if (!emit(s)) return;
    }
}

EnsembleResult run_ensemble(const Vector& psi0, const SparseOperator& H,
                            const SparseOperator& sminus, double gamma,
                            const TrajectoryConfig& cfg, const SnapshotEvaluator& observables,
                            int n_threads) {
    if (cfg.n_trajectories < 1)
        throw std::invalid_argument("run_ensemble: need at least one trajectory");

    const int m = cfg.n_trajectories;
    std::vector<Eigen::MatrixXd> per_traj(m);  // n_records x n_obs each
    std::vector<long> jumps(m, 0);
    std::vector<double> tau_grid;

    auto run_one = [&](int idx, std::vector<double>* taus) {
        std::vector<std::vector<double>> rows;
        std::vector<double> jl;
        mcwf_trajectory(psi0, H, sminus, gamma, cfg, std::uint64_t(idx),
                        [&](double tau, const Vector& psi) {
                            if (taus) taus->push_back(tau);
                            rows.push_back(observables(psi));
                            return true;
                        },
                        &jl);
        jumps[idx] = long(jl.size());
        Eigen::MatrixXd table(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < rows[r].size(); ++c) table(r, c) = rows[r][c];
        per_traj[idx] = std::move(table);
    };

    run_one(0, &tau_grid);
    if (n_threads <= 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    if (n_threads <= 1 || m <= 2) {
        for (int i = 1; i < m; ++i) run_one(i, nullptr);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{1};
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < m; i = next.fetch_add(1))
                    run_one(i, nullptr);
            });
        for (std::thread& t : pool) t.join();
    }

    const long n_rec = per_traj[0].rows();
    const long n_obs = per_traj[0].cols();
    EnsembleResult out;
    out.tau = tau_grid;
    out.mean = Eigen::MatrixXd::Zero(n_rec, n_obs);
    out.std_error = Eigen::MatrixXd::Zero(n_rec, n_obs);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n_rec, n_obs);
    // trajectory-index order: bit-reproducible regardless of schedule
    for (int i = 0; i < m; ++i) {
        out.mean += per_traj[i];
        sq += per_traj[i].cwiseProduct(per_traj[i]);
        out.total_jumps += jumps[i];
    }
    out.mean /= double(m);
    if (m > 1) {
        Eigen::MatrixXd var = (sq - double(m) * out.mean.cwiseProduct(out.mean)) /
                              double(m - 1);
        out.std_error = var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(double(m));
    }
    return out;
}

namespace {

// (ax ay az - xi) restricted to ladder rung coefficients.
Eigen::MatrixXcd ladder_trilinear_minus_xi(const LadderLayout& ladder, Complex xi) {
    const int r = ladder.rungs();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(r, r);
    for (int n = 0; n < r; ++n) {
        a(n, n) = -xi;
        if (n + 1 < r)
            a(n, n + 1) = std::sqrt((n + 1.0 + ladder.q) * (n + 1.0 + ladder.p) * (n + 1.0));
    }
    return a;
}

}  // namespace

SteadyStateResiduals steady_state_residual(const Vector& psi, const LadderLayout& ladder,
                                           Complex xi) {
    const int r = ladder.rungs();
    Vector g = psi.head(r);
    const double n = g.norm();
    if (n == 0.0) return {};
    g /= n;
    return {(ladder_trilinear_minus_xi(ladder, xi) * g).norm(), 0.0, 0.0};
}

SteadyStateResiduals steady_state_residual(const Matrix& rho, const LadderLayout& ladder,
                                           Complex xi) {
    const int r = ladder.rungs();
    Matrix gg = rho.topLeftCorner(r, r);
    const double tr = gg.trace().real();
    if (tr <= 0.0) return {};
    Eigen::MatrixXcd a = ladder_trilinear_minus_xi(ladder, xi);
    const double val = (a * gg * a.adjoint()).trace().real() / tr;
    return {std::sqrt(std::max(0.0, val)), 0.0, 0.0};
}

SteadyStateResiduals steady_state_residual(const Vector& psi, const BasisLayout& basis,
                                           Complex xi, int p, int q) {
    Vector full = Vector::Zero(basis.dim_total());
    full.head(basis.dim_vib()) = psi.head(basis.dim_vib());
    const double n = full.norm();
    if (n == 0.0) return {};
    full /= n;
    SparseOperator tri = trilinear(basis);
    auto [P, Q] = charge_ops(basis);
    return {(tri.apply(full) - xi * full).norm(),
            (P.apply(full) - double(p) * full).norm(),
            (Q.apply(full) - double(q) * full).norm()};
}

}  // namespace tcsim
