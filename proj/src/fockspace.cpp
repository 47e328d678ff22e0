#include "tcsim/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcsim {

BasisLayout::BasisLayout(int n_max_) : n_max(n_max_) {
    if (n_max < 0) throw std::invalid_argument("BasisLayout: n_max must be >= 0");
}

int BasisLayout::flatten_vib(int l, int m, int n) const {
    if (l < 0 || m < 0 || n < 0 || l > n_max || m > n_max || n > n_max)
        throw std::invalid_argument("BasisLayout: occupation outside the cutoff");
    const int d = n_max + 1;
    return (l * d + m) * d + n;
}

int BasisLayout::flatten(Ion ion, int l, int m, int n) const {
    return static_cast<int>(ion) * dim_vib() + flatten_vib(l, m, n);
}

BasisLayout::Indices BasisLayout::unflatten(int idx) const {
    const int d = n_max + 1;
    Indices out{};
    out.ion = idx < dim_vib() ? Ion::Ground : Ion::Excited;
    int v = idx % dim_vib();
    out.n = v % d;
    v /= d;
    out.m = v % d;
    out.l = v / d;
    return out;
}

BasisLayout build_basis(int n_max) { return BasisLayout(n_max); }

LadderLayout build_ladder(int p, int q, int n_max) {
    if (p < 0 || q < 0 || n_max < 0)
        throw std::invalid_argument("build_ladder: p, q, n_max must be >= 0");
    return LadderLayout{p, q, n_max};
}

namespace {

void canonicalize(std::vector<Triplet>& entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::size_t w = 0;
    for (std::size_t i = 0; i < entries.size();) {
        Triplet t = entries[i];
        std::size_t j = i + 1;
        while (j < entries.size() && entries[j].row == t.row && entries[j].col == t.col) {
            t.value += entries[j].value;
            ++j;
        }
        if (t.value != Complex(0.0, 0.0)) entries[w++] = t;
        i = j;
    }
    entries.resize(w);
}

}  // namespace

SparseOperator SparseOperator::from_triplets(int dim, std::vector<Triplet> entries) {
    SparseOperator op;
    op.dim_ = dim;
    for (const Triplet& t : entries) {
        if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim)
            throw std::out_of_range("SparseOperator: index outside layout dimension");
    }
    canonicalize(entries);
    op.entries_ = std::move(entries);
    return op;
}

SparseOperator SparseOperator::identity(int dim) {
    std::vector<Triplet> t;
    t.reserve(dim);
    for (int i = 0; i < dim; ++i) t.push_back({i, i, Complex(1.0, 0.0)});
    return from_triplets(dim, std::move(t));
}

SparseOperator SparseOperator::zero(int dim) { return from_triplets(dim, {}); }

Vector SparseOperator::apply(const Vector& v) const {
    Vector out = Vector::Zero(dim_);
    apply_into(v, out);
    return out;
}

void SparseOperator::apply_into(const Vector& v, Vector& out) const {
    out.setZero();
    for (const Triplet& t : entries_) out[t.row] += t.value * v[t.col];
}

Matrix SparseOperator::left_product(const Matrix& rho) const {
    Matrix out = Matrix::Zero(dim_, rho.cols());
    for (const Triplet& t : entries_) out.row(t.row) += t.value * rho.row(t.col);
    return out;
}

Matrix SparseOperator::right_product(const Matrix& rho) const {
    Matrix out = Matrix::Zero(rho.rows(), dim_);
    for (const Triplet& t : entries_) out.col(t.col) += t.value * rho.col(t.row);
    return out;
}

SparseOperator SparseOperator::adjoint() const {
    std::vector<Triplet> t;
    t.reserve(entries_.size());
    for (const Triplet& e : entries_) t.push_back({e.col, e.row, std::conj(e.value)});
    return from_triplets(dim_, std::move(t));
}

SparseOperator SparseOperator::scaled(Complex s) const {
    std::vector<Triplet> t = entries_;
    for (Triplet& e : t) e.value *= s;
    return from_triplets(dim_, std::move(t));
}

SparseOperator SparseOperator::operator*(const SparseOperator& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("SparseOperator: dimension mismatch");
    // Row-bucket the right factor once, then walk this operator's canonical order.
    std::vector<std::vector<Triplet>> by_row(other.dim_);
    for (const Triplet& e : other.entries_) by_row[e.row].push_back(e);
    std::vector<Triplet> t;
    for (const Triplet& a : entries_)
        for (const Triplet& b : by_row[a.col]) t.push_back({a.row, b.col, a.value * b.value});
    return from_triplets(dim_, std::move(t));
}

SparseOperator SparseOperator::operator+(const SparseOperator& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("SparseOperator: dimension mismatch");
    std::vector<Triplet> t = entries_;
    t.insert(t.end(), other.entries_.begin(), other.entries_.end());
    return from_triplets(dim_, std::move(t));
}

SparseOperator SparseOperator::operator-(const SparseOperator& other) const {
    return *this + other.scaled(Complex(-1.0, 0.0));
}

double SparseOperator::frobenius_norm() const {
    double s = 0.0;
    for (const Triplet& e : entries_) s += std::norm(e.value);
    return std::sqrt(s);
}

double SparseOperator::max_abs_entry() const {
    double m = 0.0;
    for (const Triplet& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
}

Complex SparseOperator::frobenius_inner(const SparseOperator& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("SparseOperator: dimension mismatch");
    Complex s(0.0, 0.0);
    auto it = other.entries_.begin();
    for (const Triplet& a : entries_) {
        while (it != other.entries_.end() &&
               (it->row < a.row || (it->row == a.row && it->col < a.col)))
            ++it;
        if (it != other.entries_.end() && it->row == a.row && it->col == a.col)
            s += std::conj(a.value) * it->value;
    }
    return s;
}

bool SparseOperator::is_hermitian(double tol) const {
    return (*this - adjoint()).max_abs_entry() <= tol;
}

Matrix SparseOperator::dense() const {
    Matrix out = Matrix::Zero(dim_, dim_);
    for (const Triplet& e : entries_) out(e.row, e.col) += e.value;
    return out;
}

SparseOperator annihilation(Axis axis, const BasisLayout& layout) {
    std::vector<Triplet> t;
    const int d = layout.n_max + 1;
    for (int ion = 0; ion < 2; ++ion)
        for (int l = 0; l < d; ++l)
            for (int m = 0; m < d; ++m)
                for (int n = 0; n < d; ++n) {
                    int occ = axis == Axis::X ? l : (axis == Axis::Y ? m : n);
                    if (occ == 0) continue;
                    int lr = l, mr = m, nr = n;
                    (axis == Axis::X ? lr : axis == Axis::Y ? mr : nr) -= 1;
                    t.push_back({layout.flatten(static_cast<Ion>(ion), lr, mr, nr),
                                 layout.flatten(static_cast<Ion>(ion), l, m, n),
                                 Complex(std::sqrt(static_cast<double>(occ)), 0.0)});
                }
    return SparseOperator::from_triplets(layout.dim_total(), std::move(t));
}

SparseOperator creation(Axis axis, const BasisLayout& layout) {
    return annihilation(axis, layout).adjoint();
}

SparseOperator composite_mode(int l, const BasisLayout& layout) {
    if (l < 1 || l > 4) throw std::invalid_argument("composite_mode: l must be in 1..4");
    const double sy = (l == 2 || l == 4) ? -1.0 : 1.0;
    const double sz = (l == 3 || l == 4) ? -1.0 : 1.0;
    return annihilation(Axis::X, layout) +
           annihilation(Axis::Y, layout).scaled(sy) +
           annihilation(Axis::Z, layout).scaled(sz);
}

SparseOperator trilinear(const BasisLayout& layout) {
    std::vector<Triplet> t;
    const int d = layout.n_max + 1;
    for (int ion = 0; ion < 2; ++ion)
        for (int l = 1; l < d; ++l)
            for (int m = 1; m < d; ++m)
                for (int n = 1; n < d; ++n)
                    t.push_back({layout.flatten(static_cast<Ion>(ion), l - 1, m - 1, n - 1),
                                 layout.flatten(static_cast<Ion>(ion), l, m, n),
                                 Complex(std::sqrt(double(l) * double(m) * double(n)), 0.0)});
    return SparseOperator::from_triplets(layout.dim_total(), std::move(t));
}

std::pair<SparseOperator, SparseOperator> charge_ops(const BasisLayout& layout) {
    std::vector<Triplet> tp, tq;
    const int d = layout.n_max + 1;
    for (int ion = 0; ion < 2; ++ion)
        for (int l = 0; l < d; ++l)
            for (int m = 0; m < d; ++m)
                for (int n = 0; n < d; ++n) {
                    int idx = layout.flatten(static_cast<Ion>(ion), l, m, n);
                    if (m != n) tp.push_back({idx, idx, Complex(double(m - n), 0.0)});
                    if (l != n) tq.push_back({idx, idx, Complex(double(l - n), 0.0)});
                }
    return {SparseOperator::from_triplets(layout.dim_total(), std::move(tp)),
            SparseOperator::from_triplets(layout.dim_total(), std::move(tq))};
}

SparseOperator sigma_minus(const BasisLayout& layout) {
    std::vector<Triplet> t;
    for (int v = 0; v < layout.dim_vib(); ++v)
        t.push_back({v, v + layout.dim_vib(), Complex(1.0, 0.0)});
    return SparseOperator::from_triplets(layout.dim_total(), std::move(t));
}

SparseOperator sigma_plus(const BasisLayout& layout) { return sigma_minus(layout).adjoint(); }

SparseOperator sigma_z(const BasisLayout& layout) {
    std::vector<Triplet> t;
    for (int v = 0; v < layout.dim_vib(); ++v) {
        t.push_back({v, v, Complex(-1.0, 0.0)});
        t.push_back({v + layout.dim_vib(), v + layout.dim_vib(), Complex(1.0, 0.0)});
    }
    return SparseOperator::from_triplets(layout.dim_total(), std::move(t));
}

SparseOperator excited_projector(const BasisLayout& layout) {
    std::vector<Triplet> t;
    for (int v = 0; v < layout.dim_vib(); ++v)
        t.push_back({v + layout.dim_vib(), v + layout.dim_vib(), Complex(1.0, 0.0)});
    return SparseOperator::from_triplets(layout.dim_total(), std::move(t));
}

SparseOperator sigma_minus(const LadderLayout& ladder) {
    std::vector<Triplet> t;
    for (int n = 0; n <= ladder.n_max; ++n)
        t.push_back({ladder.index(Ion::Ground, n), ladder.index(Ion::Excited, n),
                     Complex(1.0, 0.0)});
    return SparseOperator::from_triplets(ladder.dim(), std::move(t));
}

SparseOperator excited_projector(const LadderLayout& ladder) {
    std::vector<Triplet> t;
    for (int n = 0; n <= ladder.n_max; ++n) {
        int i = ladder.index(Ion::Excited, n);
        t.push_back({i, i, Complex(1.0, 0.0)});
    }
    return SparseOperator::from_triplets(ladder.dim(), std::move(t));
}

bool cutoffs_compatible(const LadderLayout& ladder, const BasisLayout& basis) {
    return ladder.n_max + std::max(ladder.p, ladder.q) <= basis.n_max;
}

ProjectionResult project_to_ladder(const Vector& full, const LadderLayout& ladder,
                                   const BasisLayout& basis) {
    if (!cutoffs_compatible(ladder, basis))
        throw std::invalid_argument("project_to_ladder: cutoff mismatch");
    if (full.size() != basis.dim_total())
        throw std::invalid_argument("project_to_ladder: vector size mismatch");
    ProjectionResult out;
    out.ladder = Vector::Zero(ladder.dim());
    double kept = 0.0;
    for (int ion = 0; ion < 2; ++ion)
        for (int n = 0; n <= ladder.n_max; ++n) {
            auto [l, m, nz] = ladder.triple(n);
            Complex a = full[basis.flatten(static_cast<Ion>(ion), l, m, nz)];
            out.ladder[ladder.index(static_cast<Ion>(ion), n)] = a;
            kept += std::norm(a);
        }
    out.leakage = full.squaredNorm() - kept;
    if (out.leakage < 0.0) out.leakage = 0.0;  // rounding
    return out;
}

Vector embed_from_ladder(const Vector& v, const LadderLayout& ladder,
                         const BasisLayout& basis) {
    if (!cutoffs_compatible(ladder, basis))
        throw std::invalid_argument("embed_from_ladder: cutoff mismatch");
    if (v.size() != ladder.dim())
        throw std::invalid_argument("embed_from_ladder: vector size mismatch");
    Vector out = Vector::Zero(basis.dim_total());
    for (int ion = 0; ion < 2; ++ion)
        for (int n = 0; n <= ladder.n_max; ++n) {
            auto [l, m, nz] = ladder.triple(n);
            out[basis.flatten(static_cast<Ion>(ion), l, m, nz)] =
                v[ladder.index(static_cast<Ion>(ion), n)];
        }
    return out;
}

}  // namespace tcsim
