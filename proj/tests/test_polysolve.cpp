#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lrpd/polysolve.hpp"

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

SymMat<Rational> example1_6x6() {
    auto q = [](int v) { return Rational(v); };
    return SymMat<Rational>{{q(0), q(1), q(2), q(1), q(0), q(1)},
                            {q(1), q(0), q(2), q(0), q(1), q(1)},
                            {q(2), q(2), q(0), q(0), q(0), q(-1)},
                            {q(1), q(0), q(0), q(0), q(1), q(5)},
                            {q(0), q(1), q(0), q(1), q(0), q(5)},
                            {q(1), q(1), q(-1), q(5), q(5), q(0)}};
}

}  // namespace

TEST_CASE("x^2 = 4 solves completely with both roots") {
    auto sys = parse_poly_system_text("x1^2 - 4\n");
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    REQUIRE(out.kind == SolveKind::solutions);
    REQUIRE(out.solutions.size() == 2);
    CHECK(out.solutions[0].exact[0].value() == Rational(-2));
    CHECK(out.solutions[1].exact[0].value() == Rational(2));
    CHECK(out.solutions[0].residual == 0.0);
}

TEST_CASE("chain system is eliminated exactly") {
    auto sys = parse_poly_system_text("x1 - 2\nx2 - x1^2\nx3 - x2^2\n");
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    REQUIRE(out.kind == SolveKind::solutions);
    REQUIRE(out.solutions.size() == 1);
    CHECK(out.solutions[0].exact[0].value() == Rational(2));
    CHECK(out.solutions[0].exact[1].value() == Rational(4));
    CHECK(out.solutions[0].exact[2].value() == Rational(16));
}

TEST_CASE("inconsistent linear systems are complete infeasibilities") {
    auto sys = parse_poly_system_text("x1 - 1\nx1 - 2\n");
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    CHECK(out.kind == SolveKind::none_found_complete);
}

TEST_CASE("no real roots is detected completely") {
    auto sys = parse_poly_system_text("x1^2 + 1\n");
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    CHECK(out.kind == SolveKind::none_found_complete);
}

TEST_CASE("two-variable exact backend via resultants") {
    // x^2 + y^2 = 5, xy = 2: solutions (1,2), (2,1), (-1,-2), (-2,-1)
    auto sys = parse_poly_system_text("x1^2 + x2^2 - 5\nx1*x2 - 2\n");
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    REQUIRE(out.kind == SolveKind::solutions);
    REQUIRE(out.solutions.size() == 4);
    std::set<std::pair<int, int>> got;
    for (const auto& s : out.solutions)
        got.insert({static_cast<int>(std::lround(s.values[0])),
                    static_cast<int>(std::lround(s.values[1]))});
    std::set<std::pair<int, int>> want{{1, 2}, {2, 1}, {-1, -2}, {-2, -1}};
    CHECK(got == want);
    for (const auto& s : out.solutions) CHECK(s.fully_exact());
}

TEST_CASE("exact backend counts match brute-force subdivision on a bounded box") {
    // property required of the exact backend: solution count equals an
    // independent interval-subdivision count
    auto count_by_subdivision = [](const PolySystem& sys, double lo, double hi) {
        // 1-d systems only: count sign changes of the gcd-like product by
        // scanning a fine grid (works for the well-separated test roots)
        int count = 0;
        const int steps = 200000;
        double prev = 0;
        bool have_prev = false;
        for (int i = 0; i <= steps; ++i) {
            double x = lo + (hi - lo) * i / steps;
            double v = 1.0;
            for (const auto& e : sys.equations) v = e.eval_double({x});
            if (have_prev && prev * v < 0) ++count;
            if (v != 0) {
                prev = v;
                have_prev = true;
            }
        }
        return count;
    };
    auto sys = parse_poly_system_text("x1^3 - 6*x1^2 + 11*x1 - 6\n");  // roots 1,2,3
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    REQUIRE(out.kind == SolveKind::solutions);
    CHECK(static_cast<int>(out.solutions.size()) ==
          count_by_subdivision(sys, -10.24, 10.24));
    CHECK(out.solutions.size() == 3);
}

TEST_CASE("square-variable elimination keeps positivity as a sign condition") {
    // x * z^2 = 1 forces x > 0; with x^2 = 4 only x = 2 survives, with z = ±2^{-1/2}
    auto sys = parse_poly_system_text("x1^2 - 4\nx1*x2^2 - 1\n");
    SolverBudget budget;
    auto out = solve_system(sys, budget);
    REQUIRE(out.kind == SolveKind::solutions);
    REQUIRE(out.solutions.size() == 2);
    for (const auto& s : out.solutions) {
        CHECK(s.exact[0].value() == Rational(2));
        CHECK(std::fabs(s.values[1]) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
}

TEST_CASE("variable cap is enforced") {
    PolySystem sys;
    sys.nvars = 20;
    SolverBudget budget;
    CHECK_THROWS_AS(solve_system(sys, budget), VariableCapExceeded);
}

TEST_CASE("inner2 assembly shapes: r = 1 has no adjugate rows") {
    SymMat<Rational> a(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j) a.set(i, j, Rational(1));
    auto cs = assemble_linear_system(a, {0}, ProblemKind::P2);
    // unique here; build inner2 from an empty basis to check the shape
    Mat<Rational> lhs(0, 1);
    auto sys = assemble_inner2(a, {0}, lhs, {});
    REQUIRE(sys.equations.size() == 1);  // only V11 z1^2 = 1
    CHECK(sys.nvars == 2);
    (void)cs;
}

TEST_CASE("example-1 5x5: algorithm2 returns a verifying family member") {
    auto a = example1_5x5();
    auto out1 = algorithm1(a, std::vector<std::size_t>{0, 1, 2}, ProblemKind::P2);
    REQUIRE(out1.kind == Alg1Kind::underdetermined);

    SolverBudget budget;
    budget.seed = 7;
    auto res = algorithm2(a, {0, 1, 2}, out1.lhs, out1.rhs, budget);
    REQUIRE(res.outcome.kind == Alg1Kind::solved);

    // the returned d must make A + Diag(d) PSD of numeric rank 3
    auto m = a;
    m.add_diag(res.outcome.d);
    auto mf = to_float(m);
    CHECK(psd_check(mf, 1e-7).psd);
    CHECK(numeric_rank(mf, 1e-9).rank == 3);

    // and V^{-1} must match the printed family: off-diagonal entries (1,2),
    // (1,3), (2,3) equal 1, 2, 2; gamma = 4(alpha+beta-1)/(alpha beta)
    auto vinv = inverse(to_float(res.outcome.v));
    double alpha = vinv(0, 0), beta = vinv(1, 1), gamma = vinv(2, 2);
    CHECK(vinv(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(vinv(0, 2) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(vinv(1, 2) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(gamma == doctest::Approx(4.0 * (alpha + beta - 1.0) / (alpha * beta)).epsilon(1e-6));
}

TEST_CASE("example-1 6x6: exactly the two solutions alpha in {2,4}") {
    auto a = example1_6x6();
    auto out1 = algorithm1(a, std::vector<std::size_t>{0, 1, 2}, ProblemKind::P2);
    REQUIRE(out1.kind == Alg1Kind::underdetermined);

    SolverBudget budget;
    budget.seed = 20240811;
    auto so = solve_inner2(a, {0, 1, 2}, out1.lhs, out1.rhs, budget);
    REQUIRE(so.kind == SolveKind::solutions);
    auto admissible = admissible_inner2_solutions(so, a, {0, 1, 2}, 1e-6);
    REQUIRE(admissible.size() == 2);

    std::vector<double> alphas;
    for (const auto& sol : admissible) {
        SymMat<double> v(3);
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t q = 0; q <= p; ++q) v.set(p, q, sol.values[svec_index(p, q)]);
        auto vinv = inverse(v);
        alphas.push_back(vinv(0, 0));
        CHECK(vinv(1, 1) == doctest::Approx(vinv(0, 0)).epsilon(1e-6));  // beta = alpha
    }
    std::sort(alphas.begin(), alphas.end());
    CHECK(alphas[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(alphas[1] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("inner2 solutions rebuild into verifying decompositions") {
    // planted rank-2: run algorithm1 on a J where it is underdetermined and
    // push through algorithm2
    SymMat<Rational> a(4);
    // U = [[1,0],[0,1],[1,1],[1,-1]] -> A = UU^T with zeroed diagonal
    Mat<Rational> u{{Rational(1), Rational(0)},
                    {Rational(0), Rational(1)},
                    {Rational(1), Rational(1)},
                    {Rational(1), Rational(-1)}};
    auto g = SymMat<Rational>::lower_of(u * u.transposed());
    std::vector<Rational> dtrue(4);
    for (std::size_t i = 0; i < 4; ++i) {
        dtrue[i] = g(i, i);
        g.set(i, i, Rational(0));
    }
    SolverBudget budget;
    for (std::vector<std::size_t> j : {std::vector<std::size_t>{0, 1}}) {
        auto o1 = algorithm1(g, j, ProblemKind::P2);
        if (o1.kind == Alg1Kind::solved) {
            CHECK(o1.d == dtrue);
        } else if (o1.kind == Alg1Kind::underdetermined) {
            auto res = algorithm2(g, j, o1.lhs, o1.rhs, budget);
            REQUIRE(res.outcome.kind == Alg1Kind::solved);
            auto m = g;
            m.add_diag(res.outcome.d);
            CHECK(numeric_rank(to_float(m), 1e-9).rank <= 2);
        }
    }
}
