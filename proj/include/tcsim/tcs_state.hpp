#pragma once

#include "tcsim/fockspace.hpp"

namespace tcsim {

/// Parameters of the trio coherent state |xi, p, q>, xi = r e^{i phi}.
struct TcsParams {
    Complex xi;
    double r = 0.0;
    double phi = 0.0;  // in [0, 2pi)
    int p = 0, q = 0;

    TcsParams() = default;
    TcsParams(Complex xi_, int p_, int q_);
};

/// Ladder-coefficient representation: |xi,p,q> = sum_n C_n |n+q, n+p, n>.
struct TcsVector {
    TcsParams params;
    int n_max = 0;
    Vector coeffs;             // C_n, n = 0..n_max
    double norm_const = 0.0;   // N(p, q, r)

    double squared_norm() const { return coeffs.squaredNorm(); }
    double truncation_remainder() const { return 1.0 - squared_norm(); }
};

/// Uniform phase grids for the double integral representation.
struct QuadratureConfig {
    int nodes_theta = 256;
    int nodes_theta_prime = 256;
};

/// Normalization coefficient N(p,q,r): N^{-2} = sum_n r^{2n} / ((n+q)!(n+p)!n!).
/// The series is summed until the next term falls below 1e-18 of the partial
/// sum (hard cap 500 terms).
double normalization(int p, int q, double r);

/// Closed-form coefficients C_n = N xi^n / sqrt((n+q)!(n+p)!n!).
TcsVector tcs_fock(const TcsParams& params, int n_max);

/// Coefficients from the double phase integral over products of coherent
/// states, trapezoid quadrature on uniform grids, principal cube root of xi.
/// Throws on r = 0 (the xi^{-(p+q)/3} prefactor is singular there).
TcsVector tcs_integral(const TcsParams& params, const QuadratureConfig& quad, int n_max);

/// Quadrature amplitude on an arbitrary Fock triple (l, m, n); off-ladder
/// triples phase-average to zero and probe the quadrature error directly.
Complex integral_fock_amplitude(const TcsParams& params, const QuadratureConfig& quad,
                                int l, int m, int n);

struct EigenrelationResiduals {
    double trilinear = 0.0;  // ||(ax ay az - xi)|v>||
    double charge_p = 0.0;   // ||(P - p)|v>||
    double charge_q = 0.0;   // ||(Q - q)|v>||
};

/// Applies the defining operators on a full-space embedding one rung larger
/// than the state and reports the residual norms.
EigenrelationResiduals verify_eigenrelations(const TcsVector& v);

/// |ion> (x) |xi,p,q> embedded in a full basis layout.
Vector embed_tcs(const TcsVector& v, const BasisLayout& basis, Ion ion);

/// |g> (x) |xi,p,q> on a ladder layout with matching (p, q).
Vector dark_state(const TcsVector& v, const LadderLayout& ladder);

}  // namespace tcsim
