#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lrpd/charsys.hpp"

using namespace lrpd;

namespace {

SymMat<Rational> example1_5x5() {
    auto q = [](int v) { return Rational(v); };
    return SymMat<Rational>{{q(0), q(1), q(2), q(1), q(0)},
                            {q(1), q(0), q(2), q(0), q(1)},
                            {q(2), q(2), q(0), q(0), q(0)},
                            {q(1), q(0), q(0), q(0), q(1)},
                            {q(0), q(1), q(0), q(1), q(0)}};
}

// A = U U^T with the diagonal zeroed; ground truth d = diag(U U^T).
struct Planted {
    SymMat<Rational> a;
    std::vector<Rational> d;
    Mat<Rational> u;
};

Planted plant_p2(std::size_t n, std::size_t r, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(-3, 3);
    Planted p;
    p.u = Mat<Rational>(n, r);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j) p.u(i, j) = Rational(dist(rng));
    auto g = SymMat<Rational>::lower_of(p.u * p.u.transposed());
    p.d.resize(n);
    p.a = g;
    for (std::size_t i = 0; i < n; ++i) {
        p.d[i] = g(i, i);
        p.a.set(i, i, Rational(0));
    }
    return p;
}

}  // namespace

TEST_CASE("example-1: J = {1,2,3} is underdetermined and the family satisfies the basis") {
    auto a = example1_5x5();
    auto cs = assemble_linear_system(a, {0, 1, 2}, ProblemKind::P2);
    CHECK(cs.status == LinStatus::underdetermined);
    REQUIRE(cs.lhs.rows() == 1);

    // the single constraint is V_21 = 1 in the paper's indexing
    // family member alpha = beta = 2, gamma = 3: V = inverse([[2,1,2],[1,2,2],[2,2,3]])
    SymMat<Rational> vinv{{Rational(2), Rational(1), Rational(2)},
                          {Rational(1), Rational(2), Rational(2)},
                          {Rational(2), Rational(2), Rational(3)}};
    auto v = SymMat<Rational>::lower_of(inverse(vinv));
    auto sv = svec(v);
    Rational lhs(0);
    for (std::size_t c = 0; c < sv.size(); ++c) lhs += cs.lhs(0, c) * sv[c];
    CHECK(lhs == cs.rhs[0]);

    auto out = algorithm1(a, {0, 1, 2}, ProblemKind::P2);
    CHECK(out.kind == Alg1Kind::underdetermined);
}

TEST_CASE("2x2 with J = {1}: no off-diagonal pairs, trivially underdetermined") {
    SymMat<Rational> a{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
    auto cs = assemble_linear_system(a, {0}, ProblemKind::P2);
    CHECK(cs.status == LinStatus::underdetermined);
    CHECK(cs.lhs.rows() == 0);
    CHECK(cs.lhs.cols() == 1);
}

TEST_CASE("rank-2 planted instance: unique V recovered by substitution") {
    std::mt19937_64 rng(2024);
    int done = 0;
    while (done < 10) {
        auto p = plant_p2(6, 2, rng);
        // J = a basis pair of U
        std::vector<std::size_t> j{0, 1};
        Mat<Rational> uj(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < 2; ++k) uj(i, k) = p.u(j[i], k);
        if (det_cofactor(uj).is_zero()) continue;

        auto cs = assemble_linear_system(p.a, j, ProblemKind::P2);
        if (cs.status != LinStatus::unique) continue;  // can be underdetermined for special U
        // V must equal (U_J U_J^T)^{-1}
        auto gram = SymMat<Rational>::lower_of(uj * uj.transposed());
        auto vexpect = SymMat<Rational>::lower_of(inverse(gram));
        CHECK(smat(cs.unique_svec) == vexpect);

        auto out = algorithm1(p.a, j, ProblemKind::P2);
        REQUIRE(out.solved());
        CHECK(out.d == p.d);
        ++done;
    }
}

TEST_CASE("all-ones off-diagonal solves at rank 1 with d = 1") {
    SymMat<Rational> a(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j) a.set(i, j, Rational(1));
    auto out = algorithm1(a, std::vector<std::size_t>{0}, ProblemKind::P2);
    REQUIRE(out.solved());
    CHECK(out.d == std::vector<Rational>{Rational(1), Rational(1), Rational(1)});

    // completed matrix is all-ones: PSD rank 1
    auto m = a;
    m.add_diag(out.d);
    CHECK(numeric_rank(m).rank == 1);
    CHECK(psd_check(m, Rational(0)).psd);
}

TEST_CASE("recover_d with identity V and zero A") {
    SymMat<Rational> a(4);
    auto w = recover_d(a, {1, 2}, SymMat<Rational>::identity(2));
    CHECK(w == std::vector<Rational>{Rational(0), Rational(1), Rational(1), Rational(0)});
}

TEST_CASE("inconsistent inner system yields the infeasibility certificate") {
    // rank-1 target on a generic matrix: A(J,i) ⊗ A(J,j) rows become
    // incompatible products
    SymMat<Rational> a{{Rational(0), Rational(1), Rational(1), Rational(2)},
                       {Rational(1), Rational(0), Rational(1), Rational(1)},
                       {Rational(1), Rational(1), Rational(0), Rational(7)},
                       {Rational(2), Rational(1), Rational(7), Rational(0)}};
    auto out = algorithm1(a, std::vector<std::size_t>{0}, ProblemKind::P2);
    CHECK(out.kind == Alg1Kind::infeasible_for_j);
    CHECK(out.certificate.find("U(J,:)") != std::string::npos);
}

TEST_CASE("unique V failing positivity is rejected with a complete certificate") {
    // plant a rank-2 instance whose unique V ends up indefinite for a bad J
    // construct directly: A with pairs forcing V = [[0,1],[1,0]]-like solution
    SymMat<Rational> a(5);
    // U rows: e1, e2, and three rows that pin V uniquely to an indefinite matrix
    // simpler: random search until we hit the branch
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> dist(-2, 2);
    bool hit = false;
    for (int trial = 0; trial < 400 && !hit; ++trial) {
        SymMat<Rational> m(5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < i; ++j) m.set(i, j, Rational(dist(rng)));
        auto out = algorithm1(m, std::vector<std::size_t>{0, 1}, ProblemKind::P2);
        if (out.kind == Alg1Kind::infeasible_for_j &&
            out.certificate.find("positive definite") != std::string::npos)
            hit = true;
    }
    CHECK(hit);
}

TEST_CASE("P1 planted diagonal noise solves with d = g") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> dist(-3, 3);
    std::uniform_int_distribution<int> gdist(0, 4);
    int done = 0;
    while (done < 10) {
        Mat<Rational> u(5, 2);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t k = 0; k < 2; ++k) u(i, k) = Rational(dist(rng));
        std::vector<Rational> g(5);
        for (auto& v : g) v = Rational(gdist(rng));
        auto a = SymMat<Rational>::lower_of(u * u.transposed());
        a.add_diag(g);

        auto out = algorithm1(a, std::vector<std::size_t>{0, 1}, ProblemKind::P1);
        if (out.kind != Alg1Kind::solved) continue;
        CHECK(out.d == g);
        // A - Diag(d) is PSD of rank <= 2
        auto m = a;
        m.sub_diag(out.d);
        CHECK(psd_check(m, Rational(0)).psd);
        CHECK(numeric_rank(m).rank <= 2);
        ++done;
    }
}

TEST_CASE("P1 affine functions d_i(V) are recorded") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dist(-2, 2);
    Mat<Rational> u(5, 2);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < 2; ++k) u(i, k) = Rational(dist(rng));
    auto a = SymMat<Rational>::lower_of(u * u.transposed());
    auto cs = assemble_linear_system(a, {0, 1}, ProblemKind::P1);
    REQUIRE(cs.divi_coeffs.rows() == 3);
    // d_i(V) = A_ii - row.svec(V); on the true V these must equal the planted 0
    Mat<Rational> uj(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k) uj(i, k) = u(i, k);
    if (!det_cofactor(uj).is_zero()) {
        auto v = SymMat<Rational>::lower_of(inverse(SymMat<Rational>::lower_of(uj * uj.transposed())));
        auto sv = svec(v);
        for (std::size_t s = 0; s < 3; ++s) {
            Rational acc(0);
            for (std::size_t c = 0; c < sv.size(); ++c) acc += cs.divi_coeffs(s, c) * sv[c];
            CHECK(cs.divi_const[s] - acc == Rational(0));
        }
    }
}

TEST_CASE("float mode agrees with exact mode on the planted family") {
    std::mt19937_64 rng(404);
    int done = 0;
    while (done < 5) {
        auto p = plant_p2(6, 2, rng);
        auto exact = algorithm1(p.a, std::vector<std::size_t>{0, 1}, ProblemKind::P2);
        auto fl = algorithm1(to_float(p.a), std::vector<std::size_t>{0, 1}, ProblemKind::P2);
        if (exact.kind != fl.kind) {
            // borderline numerics are allowed to disagree only by downgrading
            // a reject into a reject with a different reason, never
            // solved <-> not solved
            CHECK(exact.solved() == fl.solved());
        }
        if (exact.solved() && fl.solved()) {
            for (std::size_t i = 0; i < 6; ++i)
                CHECK(fl.d[i] == doctest::Approx(exact.d[i].to_double()).epsilon(1e-8));
            ++done;
        } else if (exact.kind == fl.kind) {
            ++done;
        }
    }
}
