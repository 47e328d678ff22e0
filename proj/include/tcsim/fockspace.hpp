#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tcsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

enum class Ion : int { Ground = 0, Excited = 1 };
enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Truncated 2 x (n_max+1)^3 product basis: two-level ion times three
/// vibrational modes, each mode cut off at occupation n_max.
/// Flattening is deterministic: ion index slowest, then (l, m, n) row-major.
struct BasisLayout {
    int n_max = 0;

    explicit BasisLayout(int n_max_);

    int dim_vib() const { return (n_max + 1) * (n_max + 1) * (n_max + 1); }
    int dim_total() const { return 2 * dim_vib(); }

    int flatten(Ion ion, int l, int m, int n) const;
    int flatten_vib(int l, int m, int n) const;

    struct Indices {
        Ion ion;
        int l, m, n;
    };
    Indices unflatten(int idx) const;
};

BasisLayout build_basis(int n_max);

/// Conserved-charge ladder: states (ion, |n+q>_x |n+p>_y |n>_z), n = 0..n_max.
/// Index order: ion slowest (ground rungs first), then n.
struct LadderLayout {
    int p = 0, q = 0, n_max = 0;

    int rungs() const { return n_max + 1; }
    int dim() const { return 2 * rungs(); }
    int index(Ion ion, int n) const { return static_cast<int>(ion) * rungs() + n; }
    std::array<int, 3> triple(int n) const { return {n + q, n + p, n}; }
};

LadderLayout build_ladder(int p, int q, int n_max);

struct Triplet {
    int row = 0, col = 0;
    Complex value;
};

/// Complex sparse matrix over a basis layout. Entries are kept canonical:
/// sorted by (row, col), duplicates summed, exact zeros dropped. All
/// products and sums run in this canonical order, so arithmetic is
/// bit-reproducible.
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(int dim, std::vector<Triplet> entries);
    static SparseOperator identity(int dim);
    static SparseOperator zero(int dim);

    int dim() const { return dim_; }
    int nnz() const { return static_cast<int>(entries_.size()); }
    const std::vector<Triplet>& entries() const { return entries_; }

    Vector apply(const Vector& v) const;
    void apply_into(const Vector& v, Vector& out) const;  // out += not done; out is overwritten

    Matrix left_product(const Matrix& rho) const;   // this * rho
    Matrix right_product(const Matrix& rho) const;  // rho * this

    SparseOperator adjoint() const;
    SparseOperator scaled(Complex s) const;
    SparseOperator operator*(const SparseOperator& other) const;
    SparseOperator operator+(const SparseOperator& other) const;
    SparseOperator operator-(const SparseOperator& other) const;

    double frobenius_norm() const;
    double max_abs_entry() const;
    Complex frobenius_inner(const SparseOperator& other) const;  // sum conj(a_ij) b_ij
    bool is_hermitian(double tol = 1e-12) const;

    Matrix dense() const;

private:
    int dim_ = 0;
    std::vector<Triplet> entries_;
};

// Single-mode ladder operators extended by identity on the other modes and
// the ion. Truncation is by projector: amplitudes that would leave the
// cutoff are dropped.
SparseOperator annihilation(Axis axis, const BasisLayout& layout);
SparseOperator creation(Axis axis, const BasisLayout& layout);

/// Composite directional modes of the four sideband lasers:
/// A1 = ax+ay+az, A2 = ax-ay+az, A3 = ax+ay-az, A4 = ax-ay-az.
SparseOperator composite_mode(int l, const BasisLayout& layout);

/// ax ay az on the vibrational factor, identity on the ion.
SparseOperator trilinear(const BasisLayout& layout);

/// Conserved charges (P, Q): diagonal with entries (m - n) and (l - n).
std::pair<SparseOperator, SparseOperator> charge_ops(const BasisLayout& layout);

SparseOperator sigma_minus(const BasisLayout& layout);
SparseOperator sigma_plus(const BasisLayout& layout);
SparseOperator sigma_z(const BasisLayout& layout);
SparseOperator excited_projector(const BasisLayout& layout);

SparseOperator sigma_minus(const LadderLayout& ladder);
SparseOperator excited_projector(const LadderLayout& ladder);

/// Embedding a ladder vector needs every rung triple inside the cutoff:
/// ladder.n_max + max(p, q) <= basis.n_max. Violations throw.
bool cutoffs_compatible(const LadderLayout& ladder, const BasisLayout& basis);

struct ProjectionResult {
    Vector ladder;
    double leakage = 0.0;  // total squared norm of dropped off-ladder components
};

ProjectionResult project_to_ladder(const Vector& full, const LadderLayout& ladder,
                                   const BasisLayout& basis);
Vector embed_from_ladder(const Vector& v, const LadderLayout& ladder,
                         const BasisLayout& basis);

}  // namespace tcsim
