#include "tcsim/laser_config.hpp"

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

std::array<double, 3> sideband_direction(int l) {
    const double s = 1.0 / std::sqrt(3.0);
    const double sy = (l == 2 || l == 4) ? -s : s;
    const double sz = (l == 3 || l == 4) ? -s : s;
    return {s, sy, sz};
}
}  // namespace

Complex effective_zeta(double omega, double phi, double eta) {
    if (omega < 0.0) throw std::invalid_argument("effective_zeta: Omega must be >= 0");
    return Complex(0.0, -6.0) * eta * eta * eta * omega *
           std::exp(Complex(-eta * eta / 2.0, -phi));
}

Complex effective_xi(double omega5, double omega, double eta, double phi, double phi5) {
    if (omega == 0.0 || eta == 0.0)
        throw std::domain_error("effective_xi: division by zero (Omega or eta vanishes)");
    return Complex(0.0, -1.0) * omega5 / (6.0 * omega * eta * eta * eta) *
           std::exp(Complex(0.0, phi - phi5));
}

LaserSet solve_lasers_for(Complex target_xi, double target_alpha, const IonParams& ion) {
    if (target_alpha <= 0.0)
        throw std::invalid_argument("solve_lasers_for: alpha must be > 0");
    if (ion.eta <= 0.0 || ion.eta >= 1.0)
        throw std::domain_error("solve_lasers_for: infeasible, eta outside (0, 1)");

    const double eta3 = ion.eta * ion.eta * ion.eta;
    const double phi = 0.0;
    const double omega = target_alpha * ion.gamma * std::exp(ion.eta * ion.eta / 2.0) /
                         (6.0 * eta3);

    LaserSet set;
    set.signs = SignPattern{};  // (+,-,-,+), the exactly reducing pattern
    for (int l = 1; l <= 4; ++l) {
        Laser& las = set.lasers[l - 1];
        las.rabi = omega;
        las.phase = wrap_phase(set.signs.s[l - 1] > 0 ? phi : phi + std::numbers::pi);
        las.frequency = ion.delta - 3.0 * ion.nu;
        las.direction = sideband_direction(l);
    }
    Laser& carrier = set.lasers[4];
    carrier.frequency = ion.delta;
    carrier.direction = {1.0, 0.0, 0.0};  // arbitrary orientation
    const double mod = std::abs(target_xi);
    if (mod > 0.0) {
        carrier.rabi = 6.0 * omega * eta3 * mod;
        carrier.phase = wrap_phase(phi - std::numbers::pi / 2.0 - std::arg(target_xi));
    }
    return set;
}

EffectiveParams effective_params(const LaserSet& lasers, const IonParams& ion) {
    const Laser& first = lasers.lasers[0];
    // The "common" sideband phase is the phase of the s = +1 lasers.
    const double phi = first.phase;
    EffectiveParams out;
    out.zeta = effective_zeta(first.rabi, phi, ion.eta);
    out.xi = lasers.lasers[4].rabi == 0.0
                 ? Complex(0.0, 0.0)
                 : effective_xi(lasers.lasers[4].rabi, first.rabi, ion.eta, phi,
                                lasers.lasers[4].phase);
    out.alpha = std::abs(out.zeta) / ion.gamma;
    return out;
}

SparseOperator build_full_interaction(const LaserSet& lasers, const IonParams& ion,
                                      const BasisLayout& layout) {
    const double eta3 = ion.eta * ion.eta * ion.eta;
    SparseOperator drive = SparseOperator::zero(layout.dim_total());
    for (int l = 1; l <= 4; ++l) {
        const Laser& las = lasers.lasers[l - 1];
        if (las.rabi == 0.0) continue;
        SparseOperator a = composite_mode(l, layout);
        drive = drive + (a * a * a).scaled(Complex(0.0, -eta3 / 6.0) * las.rabi *
                                           std::exp(Complex(0.0, -las.phase)));
    }
    const Laser& carrier = lasers.lasers[4];
    if (carrier.rabi != 0.0)
        drive = drive + SparseOperator::identity(layout.dim_total())
                            .scaled(carrier.rabi * std::exp(Complex(0.0, -carrier.phase)));
    SparseOperator half = drive * sigma_plus(layout);
    return half + half.adjoint();
}

namespace {

long falling(int n, int k) {
    long f = 1;
    for (int i = 0; i < k; ++i) f *= n - i;
    return f;
}

// a_x^i a_y^j a_z^k; the amplitude is a single square root of the integer
// falling-factorial product, so equal monomials are bitwise reproducible.
SparseOperator monomial(int i, int j, int k, const BasisLayout& layout) {
    std::vector<Triplet> t;
    const int d = layout.n_max + 1;
    for (int ion = 0; ion < 2; ++ion)
        for (int l = i; l < d; ++l)
            for (int m = j; m < d; ++m)
                for (int n = k; n < d; ++n)
                    t.push_back({layout.flatten(static_cast<Ion>(ion), l - i, m - j, n - k),
                                 layout.flatten(static_cast<Ion>(ion), l, m, n),
                                 Complex(std::sqrt(double(falling(l, i) * falling(m, j) *
                                                          falling(n, k))),
                                         0.0)});
    return SparseOperator::from_triplets(layout.dim_total(), std::move(t));
}

}  // namespace

ReductionFit verify_trilinear_reduction(const SignPattern& signs, const BasisLayout& layout) {
    if (layout.n_max < 3)
        throw std::invalid_argument("verify_trilinear_reduction: need n_max >= 3");
    // Multinomial expansion of sum_l s_l (a_x + sy_l a_y + sz_l a_z)^3: the
    // combined coefficient of each monomial is an exact integer, so the
    // cancellations happen before any floating-point matrix arithmetic.
    SparseOperator sum = SparseOperator::zero(layout.dim_total());
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j + i <= 3; ++j) {
            const int k = 3 - i - j;
            const long multi = falling(3, 3) / (falling(i, i) * falling(j, j) * falling(k, k));
            long coeff = 0;
            for (int l = 1; l <= 4; ++l) {
                const int sy = (l == 2 || l == 4) ? -1 : 1;
                const int sz = (l == 3 || l == 4) ? -1 : 1;
                long term = multi * signs.s[l - 1];
                for (int a = 0; a < j; ++a) term *= sy;
                for (int a = 0; a < k; ++a) term *= sz;
                coeff += term;
            }
            if (coeff != 0)
                sum = sum + monomial(i, j, k, layout).scaled(Complex(double(coeff), 0.0));
        }
    SparseOperator tri = trilinear(layout);
    const Complex c = tri.frobenius_inner(sum) / tri.frobenius_inner(tri);
    return {c, (sum - tri.scaled(c)).frobenius_norm()};
}

std::array<SignPattern, 8> all_sign_patterns() {
    std::array<SignPattern, 8> out;
    for (int i = 0; i < 8; ++i)
        out[i].s = {1, (i & 4) ? -1 : 1, (i & 2) ? -1 : 1, (i & 1) ? -1 : 1};
    return out;
}

double map_alpha_between_schemes(double alpha_l8) {
    if (alpha_l8 <= 0.0)
        throw std::invalid_argument("map_alpha_between_schemes: alpha must be > 0");
    return 6.0 * alpha_l8;
}

}  // namespace tcsim
