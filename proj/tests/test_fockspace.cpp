#include <doctest.h>

#include "tcsim/fockspace.hpp"

#include <cmath>

using namespace tcsim;

TEST_CASE("basis layout: ion slowest, (l,m,n) row-major") {
    BasisLayout b(3);
    CHECK(b.dim_vib() == 64);
    CHECK(b.dim_total() == 128);
    CHECK(b.flatten(Ion::Ground, 0, 0, 0) == 0);
    CHECK(b.flatten(Ion::Ground, 0, 0, 1) == 1);
    CHECK(b.flatten(Ion::Ground, 0, 1, 0) == 4);
    CHECK(b.flatten(Ion::Ground, 1, 0, 0) == 16);
    CHECK(b.flatten(Ion::Excited, 0, 0, 0) == 64);
    for (int idx : {0, 1, 17, 63, 64, 100, 127}) {
        auto u = b.unflatten(idx);
        CHECK(b.flatten(u.ion, u.l, u.m, u.n) == idx);
    }
    CHECK_THROWS_AS(b.flatten(Ion::Ground, 4, 0, 0), std::invalid_argument);
}

TEST_CASE("ladder layout indexing and rung triples") {
    LadderLayout lad = build_ladder(3, 2, 10);
    CHECK(lad.dim() == 22);
    CHECK(lad.index(Ion::Ground, 0) == 0);
    CHECK(lad.index(Ion::Excited, 0) == 11);
    CHECK(lad.triple(4) == std::array<int, 3>{6, 7, 4});
}

TEST_CASE("annihilation acts as sqrt(n) lowering, creation is its adjoint") {
    BasisLayout b(4);
    SparseOperator ax = annihilation(Axis::X, b);
    Vector v = Vector::Zero(b.dim_total());
    v[b.flatten(Ion::Ground, 3, 1, 2)] = 1.0;
    Vector w = ax.apply(v);
    CHECK(std::abs(w[b.flatten(Ion::Ground, 2, 1, 2)] - std::sqrt(3.0)) < 1e-15);
    CHECK(w.squaredNorm() == doctest::Approx(3.0));

    SparseOperator diff = creation(Axis::X, b) - ax.adjoint();
    CHECK(diff.max_abs_entry() == 0.0);
}

TEST_CASE("[a, adag] = 1 away from the cutoff boundary") {
    BasisLayout b(5);
    SparseOperator a = annihilation(Axis::Y, b);
    SparseOperator comm = a * creation(Axis::Y, b) - creation(Axis::Y, b) * a;
    Vector v = Vector::Zero(b.dim_total());
    v[b.flatten(Ion::Ground, 2, 3, 1)] = 1.0;  // m < n_max: commutator must be 1
    CHECK((comm.apply(v) - v).norm() < 1e-15);
}

TEST_CASE("charge operators are the occupation differences") {
    BasisLayout b(4);
    auto [P, Q] = charge_ops(b);
    Vector v = Vector::Zero(b.dim_total());
    const int idx = b.flatten(Ion::Excited, 4, 3, 1);
    v[idx] = 1.0;
    CHECK(std::abs(P.apply(v)[idx] - Complex(2.0, 0.0)) < 1e-15);  // m - n
    CHECK(std::abs(Q.apply(v)[idx] - Complex(3.0, 0.0)) < 1e-15);  // l - n
}

TEST_CASE("trilinear equals the product of the three annihilators") {
    BasisLayout b(4);
    SparseOperator prod =
        annihilation(Axis::X, b) * annihilation(Axis::Y, b) * annihilation(Axis::Z, b);
    CHECK((trilinear(b) - prod).max_abs_entry() < 1e-14);
}

TEST_CASE("sparse operator canonical form and algebra") {
    SparseOperator a = SparseOperator::from_triplets(
        3, {{1, 2, Complex(1.0, 0.0)}, {1, 2, Complex(2.0, 0.0)}, {0, 0, Complex(0.0, 0.0)}});
    CHECK(a.nnz() == 1);  // duplicates summed, exact zeros dropped
    CHECK(a.entries()[0].value == Complex(3.0, 0.0));

    SparseOperator i3 = SparseOperator::identity(3);
    CHECK(i3.frobenius_norm() == doctest::Approx(std::sqrt(3.0)));
    CHECK(i3.is_hermitian());
    CHECK((a + i3 - a - i3).nnz() == 0);
    CHECK((a.adjoint().adjoint() - a).nnz() == 0);
    CHECK(a.frobenius_inner(a) == Complex(9.0, 0.0));

    CHECK_THROWS_AS(a + SparseOperator::identity(4), std::invalid_argument);
}

TEST_CASE("ion operators on both layouts") {
    BasisLayout b(2);
    SparseOperator sm = sigma_minus(b);
    Vector v = Vector::Zero(b.dim_total());
    v[b.flatten(Ion::Excited, 1, 2, 0)] = 1.0;
    Vector w = sm.apply(v);
    CHECK(std::abs(w[b.flatten(Ion::Ground, 1, 2, 0)] - 1.0) < 1e-15);
    CHECK((sm * sm).nnz() == 0);
    CHECK((sigma_plus(b) - sm.adjoint()).nnz() == 0);
    CHECK((excited_projector(b) - sm.adjoint() * sm).max_abs_entry() < 1e-15);

    LadderLayout lad = build_ladder(1, 1, 2);
    SparseOperator sml = sigma_minus(lad);
    Vector u = Vector::Zero(lad.dim());
    u[lad.index(Ion::Excited, 1)] = 1.0;
    CHECK(std::abs(sml.apply(u)[lad.index(Ion::Ground, 1)] - 1.0) < 1e-15);
}

TEST_CASE("ladder embedding round trip and leakage accounting") {
    LadderLayout lad = build_ladder(3, 2, 4);
    BasisLayout b(7);  // 4 + max(3,2) = 7, minimal compatible cutoff
    CHECK(cutoffs_compatible(lad, b));
    CHECK_FALSE(cutoffs_compatible(lad, BasisLayout(6)));

    Vector v = Vector::Random(lad.dim());
    v.normalize();
    Vector full = embed_from_ladder(v, lad, b);
    auto back = project_to_ladder(full, lad, b);
    CHECK((back.ladder - v).norm() < 1e-15);
    CHECK(back.leakage == 0.0);

    full[b.flatten(Ion::Ground, 1, 0, 0)] = Complex(0.5, 0.0);  // off-ladder component
    CHECK(project_to_ladder(full, lad, b).leakage == doctest::Approx(0.25));

    CHECK_THROWS_AS(embed_from_ladder(v, lad, BasisLayout(5)), std::invalid_argument);
}
