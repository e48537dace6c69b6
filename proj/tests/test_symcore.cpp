#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lrpd/linalg.hpp"

using namespace lrpd;

namespace {

const SymMat<Rational> kExample1{{Rational(0), Rational(1), Rational(2), Rational(1), Rational(0)},
                                 {Rational(1), Rational(0), Rational(2), Rational(0), Rational(1)},
                                 {Rational(2), Rational(2), Rational(0), Rational(0), Rational(0)},
                                 {Rational(1), Rational(0), Rational(0), Rational(0), Rational(1)},
                                 {Rational(0), Rational(1), Rational(0), Rational(1), Rational(0)}};

SymMat<Rational> gram_exact(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(-3, 3);
    Mat<Rational> u(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) u(i, j) = Rational(dist(rng));
    return SymMat<Rational>::lower_of(u * u.transposed());
}

SymMat<double> gram_float(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Mat<double> u(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) u(i, j) = dist(rng);
    return SymMat<double>::lower_of(u * u.transposed());
}

}  // namespace

TEST_CASE("psd_check trivial verdicts") {
    SymMat<Rational> zero1(1);
    CHECK(psd_check(zero1, Rational(0)).psd);

    SymMat<double> flip{{0.0, 1.0}, {1.0, 0.0}};
    auto v = psd_check(flip, 1e-12);
    CHECK_FALSE(v.psd);
    REQUIRE(v.witness.size() == 2);
    CHECK(v.witness_value < 0.0);
    // the canonical direction [1,-1] gives -2
    std::vector<double> x{1.0, -1.0};
    CHECK(quad_form(flip, x) == doctest::Approx(-2.0));

    SymMat<double> ones(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j <= i; ++j) ones.set(i, j, 1.0);
    CHECK(psd_check(ones, 1e-12).psd);
}

TEST_CASE("psd_check exact witness is certified") {
    SymMat<Rational> m{{Rational(1), Rational(2)}, {Rational(2), Rational(1)}};
    auto v = psd_check(m, Rational(0));
    REQUIRE_FALSE(v.psd);
    CHECK(quad_form(m, v.witness) == v.witness_value);
    CHECK(v.witness_value.sign() < 0);
}

TEST_CASE("psd_check float mode rejects tol = 0") {
    SymMat<double> m{{1.0}};
    CHECK_THROWS_AS(psd_check(m, 0.0), std::invalid_argument);
}

TEST_CASE("numeric_rank basics") {
    SymMat<double> ones(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j <= i; ++j) ones.set(i, j, 1.0);
    CHECK(numeric_rank(ones, 1e-9).rank == 1);

    CHECK(numeric_rank(SymMat<double>::identity(4), 1e-9).rank == 4);

    SymMat<Rational> shifted = kExample1;
    std::vector<Rational> d{Rational(2), Rational(2), Rational(3), Rational(2), Rational(2)};
    shifted.add_diag(d);
    CHECK(numeric_rank(shifted).rank == 3);
    CHECK(psd_check(shifted, Rational(0)).psd);

    auto rep = numeric_rank(to_float(shifted), 1e-9);
    CHECK(rep.rank == 3);
    CHECK(rep.smallest_accepted >= rep.tolerance);
    CHECK(rep.tolerance > rep.largest_rejected);
}

TEST_CASE("schur_complement closed forms") {
    auto s1 = schur_complement(SymMat<Rational>::identity(4), {0, 1});
    CHECK(s1 == SymMat<Rational>::identity(2));

    SymMat<Rational> m{{Rational(2), Rational(1)}, {Rational(1), Rational(2)}};
    auto s2 = schur_complement(m, {0});
    CHECK(s2.n() == 1);
    CHECK(s2(0, 0) == Rational(3, 2));
}

TEST_CASE("schur rank identity on random Gram matrices") {
    std::mt19937_64 rng(42);
    int done = 0;
    while (done < 25) {
        auto m = gram_exact(6, 3, rng);
        std::vector<std::size_t> j{0, 1, 2};
        auto block = m.principal_submatrix(j);
        if (exact_rank(block.dense()) != 3) continue;
        auto s = schur_complement(m, j);
        CHECK(exact_rank(m.dense()) == 3 + exact_rank(s.dense()));

        // float route agrees at tol 1e-8
        auto mf = to_float(m);
        auto sf = schur_complement(mf, j, 1e-9);
        CHECK(numeric_rank(mf, 1e-8).rank == 3 + numeric_rank_abs(sf, 1e-8 * std::max(1.0, max_abs(sf))).rank);
        ++done;
    }
}

TEST_CASE("schur_complement on singular PSD block uses the range condition") {
    // Gram matrix with a rank-deficient leading block: range condition holds
    std::mt19937_64 rng(7);
    Mat<Rational> u(5, 2);
    std::uniform_int_distribution<int> dist(-2, 2);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) u(i, j) = Rational(dist(rng));
    auto m = SymMat<Rational>::lower_of(u * u.transposed());
    std::vector<std::size_t> j{0, 1, 2};  // 3x3 block of a rank-<=2 matrix: singular
    REQUIRE(exact_rank(m.principal_submatrix(j).dense()) <= 2);
    auto s = schur_complement(m, j);  // must not throw
    CHECK(psd_check(s, Rational(0)).psd);

    // non-PSD with singular block and broken range condition throws
    SymMat<Rational> bad{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
    CHECK_THROWS_AS(schur_complement(bad, {0}), SingularBlockError);
}

TEST_CASE("kron, svec/smat, adjugate closed forms") {
    Mat<Rational> one{{Rational(1)}};
    Mat<Rational> m{{Rational(2), Rational(-1)}, {Rational(5), Rational(7)}};
    CHECK(kron(one, m) == m);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dist(-5, 5);
    SymMat<Rational> v(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j <= i; ++j) v.set(i, j, Rational(dist(rng)));
    CHECK(smat(svec(v)) == v);

    SymMat<Rational> a{{Rational(2), Rational(1)}, {Rational(1), Rational(2)}};
    auto adj = adjugate(a);
    CHECK(adj(0, 0) == Rational(2));
    CHECK(adj(0, 1) == Rational(-1));
    CHECK(det(a) == Rational(3));
    Mat<Rational> prod = a.dense() * adj.dense();
    CHECK(prod == Mat<Rational>::identity(2) * Rational(3));
}

TEST_CASE("adjugate identity V adj(V) = det(V) I on random matrices") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dist(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        SymMat<Rational> v(3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j <= i; ++j) v.set(i, j, Rational(dist(rng)));
        auto adj = adjugate(v);
        auto prod = v.dense() * adj.dense();
        CHECK(prod == Mat<Rational>::identity(3) * det(v));
    }
}

TEST_CASE("jacobi eigenvalues of a known matrix") {
    // eigenvalues of [[2,1],[1,2]] are 1 and 3
    SymMat<double> m{{2.0, 1.0}, {1.0, 2.0}};
    auto e = jacobi_eigen(m, true);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(3.0));
    // eigenvector residual
    for (int k = 0; k < 2; ++k) {
        std::vector<double> v{e.vectors(0, k), e.vectors(1, k)};
        auto mv = matvec(m, v);
        CHECK(mv[0] == doctest::Approx(e.values[k] * v[0]));
        CHECK(mv[1] == doctest::Approx(e.values[k] * v[1]));
    }
}

TEST_CASE("psd_check implies rank bound and diagonal sign") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = gram_float(7, 3, rng);
        auto v = psd_check(m, 1e-10);
        CHECK(v.psd);
        auto r = numeric_rank(m, 1e-9);
        CHECK(r.rank <= 7);
        for (std::size_t i = 0; i < 7; ++i) CHECK(m(i, i) >= -1e-10);
    }
}

TEST_CASE("reduce_linear trichotomy (exact)") {
    // unique
    Mat<Rational> a{{Rational(1), Rational(1)}, {Rational(1), Rational(-1)}};
    auto r1 = reduce_linear(a, {Rational(3), Rational(1)});
    REQUIRE(r1.status == LinStatus::unique);
    CHECK(r1.solution[0] == Rational(2));
    CHECK(r1.solution[1] == Rational(1));

    // inconsistent
    Mat<Rational> b{{Rational(1), Rational(1)}, {Rational(2), Rational(2)}};
    auto r2 = reduce_linear(b, {Rational(1), Rational(3)});
    CHECK(r2.status == LinStatus::inconsistent);

    // underdetermined, one independent row kept
    auto r3 = reduce_linear(b, {Rational(1), Rational(2)});
    REQUIRE(r3.status == LinStatus::underdetermined);
    CHECK(r3.rank == 1);
    CHECK(r3.basis_lhs.rows() == 1);
}

TEST_CASE("reduce_linear trichotomy (float)") {
    Mat<double> a{{1.0, 1.0}, {1.0, -1.0}};
    auto r1 = reduce_linear(a, std::vector<double>{3.0, 1.0});
    REQUIRE(r1.status == LinStatus::unique);
    CHECK(r1.solution[0] == doctest::Approx(2.0));
    CHECK(r1.solution[1] == doctest::Approx(1.0));

    Mat<double> b{{1.0, 1.0}, {2.0, 2.0}};
    CHECK(reduce_linear(b, std::vector<double>{1.0, 3.0}).status == LinStatus::inconsistent);
    auto r3 = reduce_linear(b, std::vector<double>{1.0, 2.0});
    REQUIRE(r3.status == LinStatus::underdetermined);
    CHECK(r3.rank == 1);
    // the kept row must still describe the solution set: x + y = 1 scaled
    CHECK(r3.basis_lhs(0, 0) == doctest::Approx(r3.basis_lhs(0, 1)));
    CHECK(r3.basis_rhs[0] / r3.basis_lhs(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("inverse and solve agree across modes") {
    SymMat<Rational> m{{Rational(4), Rational(1), Rational(0)},
                       {Rational(1), Rational(3), Rational(1)},
                       {Rational(0), Rational(1), Rational(5)}};
    auto inv = inverse(m);
    CHECK(m.dense() * inv == Mat<Rational>::identity(3));

    auto invf = inverse(to_float(m));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(invf(i, j) == doctest::Approx(inv(i, j).to_double()).epsilon(1e-12));
}

TEST_CASE("perturbation bound of the inverse (inverse-of-sum lemma)") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    int done = 0;
    while (done < 25) {
        Mat<double> a(4, 4), b(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                a(i, j) = dist(rng) + (i == j ? 2.0 : 0.0);
                b(i, j) = 0.05 * dist(rng);
            }
        Mat<double> ainv;
        try {
            ainv = inverse(SymMat<double>::lower_of(a * a.transposed()));
        } catch (const SingularBlockError&) {
            continue;
        }
        Mat<double> asym = a * a.transposed();
        Mat<double> bsym = b + b.transposed();
        double nb = fro_norm(bsym), nai = fro_norm(ainv);
        if (nb * nai >= 0.9) continue;
        Mat<double> sum_inv = inverse(SymMat<double>::lower_of(asym + bsym));
        double z = fro_norm(sum_inv - ainv);
        CHECK(z <= nb * nai * nai / (1.0 - nb * nai) + 1e-9);
        ++done;
    }
}
