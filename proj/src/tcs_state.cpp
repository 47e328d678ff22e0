#include "tcsim/tcs_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    return phi;
}

double sqrt_factorial_product(int l, int m, int n) {
    return std::exp(0.5 * (std::lgamma(l + 1.0) + std::lgamma(m + 1.0) + std::lgamma(n + 1.0)));
}
}  // namespace

TcsParams::TcsParams(Complex xi_, int p_, int q_)
    : xi(xi_), r(std::abs(xi_)), phi(wrap_phase(std::arg(xi_))), p(p_), q(q_) {
    if (p < 0 || q < 0) throw std::invalid_argument("TcsParams: p, q must be >= 0");
}

double normalization(int p, int q, double r) {
    if (p < 0 || q < 0 || r < 0.0)
        throw std::invalid_argument("normalization: p, q >= 0 and r >= 0 required");
    // term_n = r^{2n} / ((n+q)! (n+p)! n!), factorially convergent
    double term = std::exp(-(std::lgamma(q + 1.0) + std::lgamma(p + 1.0)));
    double sum = term;
    const double r2 = r * r;
    for (int n = 0; n < 500; ++n) {
        term *= r2 / ((n + 1.0 + q) * (n + 1.0 + p) * (n + 1.0));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return 1.0 / std::sqrt(sum);
}

TcsVector tcs_fock(const TcsParams& params, int n_max) {
    if (n_max < 0) throw std::invalid_argument("tcs_fock: n_max must be >= 0");
    TcsVector v{params, n_max, Vector::Zero(n_max + 1),
                normalization(params.p, params.q, params.r)};
    Complex c = v.norm_const *
                std::exp(-0.5 * (std::lgamma(params.q + 1.0) + std::lgamma(params.p + 1.0)));
    v.coeffs[0] = c;
    for (int n = 1; n <= n_max; ++n) {
        c *= params.xi / std::sqrt((n + double(params.q)) * (n + double(params.p)) * double(n));
        v.coeffs[n] = c;
    }
    return v;
}

Complex integral_fock_amplitude(const TcsParams& params, const QuadratureConfig& quad,
                                int l, int m, int n) {
    if (params.r <= 0.0)
        throw std::domain_error("tcs_integral: singular at r = 0 (xi^{-(p+q)/3} prefactor)");
    if (quad.nodes_theta < 1 || quad.nodes_theta_prime < 1)
        throw std::invalid_argument("tcs_integral: node counts must be >= 1");

    // Principal branch throughout: beta = xi^{1/3}, prefactor 1/xi^{(p+q)/3}.
    // The exp(3 r^{2/3}/2) prefactor and the per-mode coherent-state
    // Gaussians are both evaluated numerically; their cancellation is part
    // of what the quadrature cross-check probes.
    const Complex log_xi = std::log(params.xi);
    const Complex beta = std::exp(log_xi / 3.0);
    const Complex pref =
        normalization(params.p, params.q, params.r) *
        std::exp(1.5 * std::pow(params.r, 2.0 / 3.0)) *
        std::exp(-log_xi * (double(params.p) + double(params.q)) / 3.0);
    const double inv_fact = 1.0 / sqrt_factorial_product(l, m, n);

    Complex acc(0.0, 0.0);
    const int K = quad.nodes_theta, Kp = quad.nodes_theta_prime;
    for (int j = 0; j < K; ++j) {
        const double theta = kTwoPi * j / K;
        const Complex b1 = beta * std::polar(1.0, theta);
        for (int jp = 0; jp < Kp; ++jp) {
            const double thetap = kTwoPi * jp / Kp;
            const Complex b2 = beta * std::polar(1.0, thetap);
            const Complex b3 = beta * std::polar(1.0, -(theta + thetap));
            const double gauss =
                std::exp(-0.5 * (std::norm(b1) + std::norm(b2) + std::norm(b3)));
            acc += std::polar(1.0, -(params.q * theta + params.p * thetap)) * gauss *
                   std::pow(b1, l) * std::pow(b2, m) * std::pow(b3, n);
        }
    }
    return pref * inv_fact * acc / (double(K) * double(Kp));
}

TcsVector tcs_integral(const TcsParams& params, const QuadratureConfig& quad, int n_max) {
    TcsVector v{params, n_max, Vector::Zero(n_max + 1),
                normalization(params.p, params.q, params.r)};
    for (int n = 0; n <= n_max; ++n)
        v.coeffs[n] = integral_fock_amplitude(params, quad, n + params.q, n + params.p, n);
    return v;
}

Vector embed_tcs(const TcsVector& v, const BasisLayout& basis, Ion ion) {
    LadderLayout ladder = build_ladder(v.params.p, v.params.q, v.n_max);
    if (!cutoffs_compatible(ladder, basis))
        throw std::invalid_argument("embed_tcs: cutoff mismatch");
    Vector out = Vector::Zero(basis.dim_total());
    for (int n = 0; n <= v.n_max; ++n) {
        auto [l, m, nz] = ladder.triple(n);
        out[basis.flatten(ion, l, m, nz)] = v.coeffs[n];
    }
    return out;
}

Vector dark_state(const TcsVector& v, const LadderLayout& ladder) {
    if (ladder.p != v.params.p || ladder.q != v.params.q)
        throw std::invalid_argument("dark_state: (p, q) mismatch");
    Vector out = Vector::Zero(ladder.dim());
    for (int n = 0; n <= std::min(v.n_max, ladder.n_max); ++n)
        out[ladder.index(Ion::Ground, n)] = v.coeffs[n];
    return out;
}

EigenrelationResiduals verify_eigenrelations(const TcsVector& v) {
    const int pad = std::max(v.params.p, v.params.q) + 1;
    BasisLayout basis = build_basis(v.n_max + pad);
    Vector w = embed_tcs(v, basis, Ion::Ground);

    SparseOperator tri = trilinear(basis);
    auto [P, Q] = charge_ops(basis);

    Vector t = tri.apply(w) - v.params.xi * w;
    Vector rp = P.apply(w) - double(v.params.p) * w;
    Vector rq = Q.apply(w) - double(v.params.q) * w;
    return {t.norm(), rp.norm(), rq.norm()};
}

}  // namespace tcsim
