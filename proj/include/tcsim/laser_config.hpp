#pragma once

#include "tcsim/fockspace.hpp"

#include <array>

namespace tcsim {

/// Physical ion/trap parameters (hbar = 1). delta and nu only set the laser
/// frequencies; the interaction-picture dynamics depends on (zeta, xi, gamma).
struct IonParams {
    double delta = 100.0;  // two-level gap
    double nu = 10.0;      // trap quantum
    double eta = 0.1;      // Lamb-Dicke parameter
    double gamma = 1.0;    // spontaneous-emission rate

    bool lamb_dicke_ok() const { return eta > 0.0 && eta <= 0.25; }
};

struct Laser {
    double rabi = 0.0;
    double phase = 0.0;  // in [0, 2pi)
    double frequency = 0.0;
    std::array<double, 3> direction{0.0, 0.0, 0.0};  // unit vector, metadata
};

/// Relative signs s_l = e^{-i(phi_l - phi)} of the four sideband drives.
struct SignPattern {
    std::array<int, 4> s{1, -1, -1, 1};
};

struct LaserSet {
    std::array<Laser, 5> lasers;  // l = 1..4 third-lower-sideband, l = 5 carrier
    SignPattern signs;
};

struct EffectiveParams {
    Complex zeta;
    Complex xi;
    double alpha = 0.0;  // |zeta| / gamma
};

/// zeta = -6 i eta^3 Omega exp(-(i phi + eta^2 / 2))
Complex effective_zeta(double omega, double phi, double eta);

/// xi = -i Omega5 / (6 Omega eta^3) exp(i (phi - phi5)); throws on
/// Omega = 0 or eta = 0.
Complex effective_xi(double omega5, double omega, double eta, double phi, double phi5);

/// Inverse map: pick a common sideband Rabi frequency from alpha = |zeta|/gamma
/// (common phase 0), then the carrier drive from the target xi. The returned
/// set forward-evaluates back to the targets within 1e-12.
LaserSet solve_lasers_for(Complex target_xi, double target_alpha, const IonParams& ion);

EffectiveParams effective_params(const LaserSet& lasers, const IonParams& ion);

/// Full leading-order interaction Hamiltonian:
/// H = [-(i eta^3 / 6) sum_l Omega_l e^{-i phi_l} A_l^3 + Omega5 e^{-i phi5}] s+ + H.c.
SparseOperator build_full_interaction(const LaserSet& lasers, const IonParams& ion,
                                      const BasisLayout& layout);

struct ReductionFit {
    Complex scale;        // best-fit c in sum_l s_l A_l^3 ~ c ax ay az
    double residual = 0.0;  // Frobenius norm of the remainder
};

/// Least-squares fit of the signed cube combination against the trilinear
/// operator. The pattern (+,-,-,+) reduces exactly with scale 24; the other
/// patterns leave residual cubic terms.
ReductionFit verify_trilinear_reduction(const SignPattern& signs, const BasisLayout& layout);

/// All eight sign patterns with s_1 = +1 (global sign quotiented out).
std::array<SignPattern, 8> all_sign_patterns();

/// alpha correspondence between the eight-laser scheme and this one: x6.
double map_alpha_between_schemes(double alpha_l8);

}  // namespace tcsim
