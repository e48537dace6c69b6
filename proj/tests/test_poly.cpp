#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "lrpd/poly.hpp"

using namespace lrpd;

TEST_CASE("poly arithmetic and evaluation") {
    Poly x = Poly::variable(2, 0);
    Poly y = Poly::variable(2, 1);
    Poly p = x * x + y * Rational(3) - Poly::constant(2, Rational(4));
    CHECK(p.total_degree() == 2);
    CHECK(p.eval({Rational(2), Rational(1)}) == Rational(3));
    CHECK(p.eval_double({2.0, 1.0}) == doctest::Approx(3.0));
    CHECK(p.derivative(0).eval({Rational(2), Rational(1)}) == Rational(4));

    Poly q = p.substitute(1, x * x);  // y -> x^2
    CHECK(q.eval({Rational(2), Rational(0)}) == Rational(4 + 12 - 4));
    CHECK_FALSE(q.uses_var(1));
}

TEST_CASE("poly parser round trips") {
    auto sys = parse_poly_system_text("x1^2 - 4 = 0\n3/2*x1*x2 + x2 - 1\n# comment\n");
    REQUIRE(sys.equations.size() == 2);
    CHECK(sys.nvars == 2);
    CHECK(sys.equations[0].eval({Rational(2), Rational(0)}) == Rational(0));
    CHECK(sys.equations[1].eval({Rational(2), Rational(1)}) == Rational(3));

    auto text = format_poly_system(sys);
    auto sys2 = parse_poly_system_text(text);
    REQUIRE(sys2.equations.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(sys.equations[i] == sys2.equations[i]);
}

TEST_CASE("parser handles rhs and juxtaposition") {
    auto sys = parse_poly_system_text("x2 = x1^2\n2x1 = 4\n");
    CHECK(sys.equations[0].eval({Rational(3), Rational(9)}) == Rational(0));
    CHECK(sys.equations[1].eval({Rational(2), Rational(0)}) == Rational(0));
}

TEST_CASE("upoly division and gcd") {
    // (x-1)(x-2) = x^2 - 3x + 2
    UPoly p({Rational(2), Rational(-3), Rational(1)});
    UPoly d({Rational(-1), Rational(1)});
    auto q = p.divide_exact(d);
    CHECK(q.degree() == 1);
    CHECK(q.eval(Rational(2)) == Rational(0));

    UPoly g = upoly_gcd(p, d);
    CHECK(g.degree() == 1);
    CHECK(g.eval(Rational(1)) == Rational(0));
}

TEST_CASE("sturm isolation finds all real roots exactly") {
    // (x-2)(x+2)(x-16): roots -2, 2, 16
    UPoly p({Rational(64), Rational(-4), Rational(-16), Rational(1)});
    auto roots = isolate_real_roots(p, Rational(1, 1000000));
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].exact.value() == Rational(-2));
    CHECK(roots[1].exact.value() == Rational(2));
    CHECK(roots[2].exact.value() == Rational(16));
}

TEST_CASE("sturm isolation on irrational roots returns tight enclosures") {
    // x^2 - 2
    UPoly p({Rational(-2), Rational(0), Rational(1)});
    auto roots = isolate_real_roots(p, Rational(1, 1) / Rational(1LL << 40));
    REQUIRE(roots.size() == 2);
    for (const auto& r : roots) {
        CHECK_FALSE(r.exact.has_value());
        double mid = ((r.lo + r.hi) / Rational(2)).to_double();
        CHECK(std::abs(std::abs(mid) - std::sqrt(2.0)) < 1e-10);
    }
}

TEST_CASE("sturm handles repeated roots via square-free reduction") {
    // (x-1)^2 (x+3)
    UPoly xm1({Rational(-1), Rational(1)});
    UPoly xp3({Rational(3), Rational(1)});
    UPoly p = xm1 * xm1 * xp3;
    auto roots = isolate_real_roots(p, Rational(1, 1024));
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].exact.value() == Rational(-3));
    CHECK(roots[1].exact.value() == Rational(1));
}

TEST_CASE("resultant eliminates a variable") {
    // f = x^2 + y^2 - 5, g = x*y - 2  ->  Res_y = x^4 - 5x^2 + 4 (roots x = ±1, ±2)
    Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    Poly f = x * x + y * y - Poly::constant(2, Rational(5));
    Poly g = x * y - Poly::constant(2, Rational(2));
    UPoly res = resultant_wrt(f, g, 0, 1);
    REQUIRE(res.degree() == 4);
    auto roots = isolate_real_roots(res, Rational(1, 1000000));
    REQUIRE(roots.size() == 4);
    CHECK(roots[0].exact.value() == Rational(-2));
    CHECK(roots[1].exact.value() == Rational(-1));
    CHECK(roots[2].exact.value() == Rational(1));
    CHECK(roots[3].exact.value() == Rational(2));
}

TEST_CASE("graph io lives next door") {
    // smoke: ensure header coherence when both headers are included together
    CHECK(true);
}
