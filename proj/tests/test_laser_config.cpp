#include <doctest.h>

#include "tcsim/laser_config.hpp"
#include "tcsim/dynamics.hpp"

#include <cmath>
#include <complex>

using namespace tcsim;

TEST_CASE("effective coupling constant at the reference point") {
    // eta = 0.1, Omega = 1, phi = 0: zeta = -6 i eta^3 e^{-eta^2/2}
    const Complex z = effective_zeta(1.0, 0.0, 0.1);
    CHECK(z.real() == doctest::Approx(0.0));
    CHECK(z.imag() == doctest::Approx(-6e-3 * std::exp(-0.005)).epsilon(1e-14));
    CHECK(std::abs(z) == doctest::Approx(0.0059700748755).epsilon(1e-10));
}

TEST_CASE("carrier drive Omega5 = 12 eta^3 realizes xi = 2 at Omega = 1") {
    const Complex xi = effective_xi(0.012, 1.0, 0.1, 0.0, -M_PI / 2.0);
    CHECK(std::abs(xi - Complex(2.0, 0.0)) < 1e-12);
    CHECK_THROWS_AS(effective_xi(0.012, 0.0, 0.1, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(effective_xi(0.012, 1.0, 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("laser solve round-trips through the forward map") {
    IonParams ion;
    for (Complex xi : {Complex(2.0, 0.0), Complex(0.5, 0.0), Complex(1.0, -2.0)}) {
        for (double alpha : {0.02, 0.12, 0.5}) {
            LaserSet set = solve_lasers_for(xi, alpha, ion);
            EffectiveParams eff = effective_params(set, ion);
            CHECK(std::abs(eff.xi - xi) < 1e-12 * (1.0 + std::abs(xi)));
            CHECK(eff.alpha == doctest::Approx(alpha).epsilon(1e-13));
            // sidebands on the third lower sideband, carrier on resonance
            CHECK(set.lasers[0].frequency == doctest::Approx(ion.delta - 3.0 * ion.nu));
            CHECK(set.lasers[4].frequency == doctest::Approx(ion.delta));
        }
    }
    CHECK_THROWS_AS(solve_lasers_for(Complex(2.0, 0.0), 0.0, ion), std::invalid_argument);
}

TEST_CASE("only the alternating-pair sign pattern reduces the cube sum") {
    BasisLayout layout(5);
    int reducing = 0;
    for (const SignPattern& sp : all_sign_patterns()) {
        ReductionFit fit = verify_trilinear_reduction(sp, layout);
        const bool exact = fit.residual < 1e-13;
        if (exact) {
            ++reducing;
            CHECK(std::abs(fit.scale - Complex(24.0, 0.0)) < 1e-10);
            CHECK(sp.s == std::array<int, 4>{1, -1, -1, 1});
        } else {
            CHECK(fit.residual > 1.0);  // leftover cubic terms are O(1) operators
        }
    }
    CHECK(reducing == 1);
}

TEST_CASE("non-reducing pattern leaves the predicted a_y^3 term") {
    // signs (+,-,+,-): sum_l s_l sy_l^3 = 4, so <0,0,0|S|0,3,0> = 4 sqrt(6)
    BasisLayout layout(4);
    SparseOperator sum = SparseOperator::zero(layout.dim_total());
    for (int l = 1; l <= 4; ++l) {
        SparseOperator a = composite_mode(l, layout);
        const double s = (l == 2 || l == 4) ? -1.0 : 1.0;
        sum = sum + (a * a * a).scaled(Complex(s, 0.0));
    }
    Matrix dense = sum.dense();
    const Complex elem = dense(layout.flatten(Ion::Ground, 0, 0, 0),
                               layout.flatten(Ion::Ground, 0, 3, 0));
    CHECK(std::abs(elem - Complex(4.0 * std::sqrt(6.0), 0.0)) < 1e-12);
}

TEST_CASE("full interaction equals the calibrated trilinear Hamiltonian") {
    IonParams ion;
    const Complex xi(2.0, 0.0);
    BasisLayout layout(4);
    LaserSet set = solve_lasers_for(xi, 0.02, ion);
    SparseOperator full = build_full_interaction(set, ion, layout);
    CHECK(full.is_hermitian());

    const double eta3 = std::pow(ion.eta, 3);
    const Complex zeta_cal = 24.0 * Complex(0.0, -eta3 / 6.0) * set.lasers[0].rabi *
                             std::exp(Complex(0.0, -set.lasers[0].phase));
    const Complex carrier =
        set.lasers[4].rabi * std::exp(Complex(0.0, -set.lasers[4].phase));
    SparseOperator simple = build_hamiltonian(zeta_cal, -carrier / zeta_cal, layout);
    CHECK((full - simple).frobenius_norm() / full.frobenius_norm() < 1e-12);
    // the calibrated magnitude matches the effective map up to the eta^2
    // Lamb-Dicke correction absorbed in the forward formula
    CHECK(std::abs(zeta_cal) == doctest::Approx(4.0 * eta3 * set.lasers[0].rabi));
}

TEST_CASE("drive-strength map between the laser schemes") {
    CHECK(map_alpha_between_schemes(0.02) == doctest::Approx(0.12));
    CHECK_THROWS_AS(map_alpha_between_schemes(0.0), std::invalid_argument);
    CHECK_THROWS_AS(map_alpha_between_schemes(-1.0), std::invalid_argument);
}

TEST_CASE("lamb-dicke sanity flag") {
    IonParams ion;
    CHECK(ion.lamb_dicke_ok());
    ion.eta = 0.4;
    CHECK_FALSE(ion.lamb_dicke_ok());
}
