#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "lrpd/json_io.hpp"

using namespace lrpd;

namespace {

Instance<Rational> random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-12, 12);
    std::uniform_int_distribution<int> den(1, 9);
    std::uniform_int_distribution<int> nd(2, 7);
    std::uniform_int_distribution<int> kindd(0, 2);
    Instance<Rational> inst;
    int kind = kindd(rng);
    inst.kind = kind == 0 ? ProblemKind::P1 : (kind == 1 ? ProblemKind::P2 : ProblemKind::P3);
    std::size_t n = nd(rng);
    inst.a = SymMat<Rational>(n);
    if (inst.kind == ProblemKind::P3) {
        // random pattern; values only on the pattern
        std::uniform_int_distribution<int> coin(0, 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (coin(rng)) {
                    inst.pattern.push_back({i, j});
                    inst.a.set(i, j, Rational(num(rng), den(rng)));
                }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) inst.a.set(i, j, Rational(num(rng), den(rng)));
        if (inst.kind == ProblemKind::P1)
            for (std::size_t i = 0; i < n; ++i) inst.a.set(i, i, Rational(num(rng), den(rng)));
    }
    inst.r = 1 + rng() % n;
    return inst;
}

}  // namespace

TEST_CASE("rational parsing forms") {
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(Rational::parse("2.5") == Rational(5, 2));
    CHECK(Rational::parse("+1/3") == Rational(1, 3));
    CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
}

TEST_CASE("instance JSON round trips losslessly in exact mode") {
    std::mt19937_64 rng(20240810);
    for (int t = 0; t < 100; ++t) {
        auto inst = random_instance(rng);
        auto j = instance_to_json(inst);
        auto back = std::get<Instance<Rational>>(instance_from_json(j));
        CHECK(back.a == inst.a);
        CHECK(back.kind == inst.kind);
        CHECK(back.pattern == inst.pattern);
        CHECK(back.r == inst.r);
        // dump/parse round trip too
        auto reparsed = nlohmann::json::parse(j.dump());
        auto back2 = std::get<Instance<Rational>>(instance_from_json(reparsed));
        CHECK(back2.a == inst.a);
    }
}

TEST_CASE("decomposition JSON round trips") {
    Decomposition<Rational> dec;
    dec.d = {Rational(2), Rational(-1, 3)};
    SymMat<Rational> l(2);
    l.set(0, 1, Rational(5, 7));
    dec.l = l;
    Mat<Rational> u(2, 1);
    u(0, 0) = Rational(1, 2);
    dec.u = u;
    dec.achieved_rank = 1;
    auto j = decomposition_to_json(dec, "h123");
    auto back = std::get<Decomposition<Rational>>(decomposition_from_json(j));
    CHECK(back.d == dec.d);
    CHECK(*back.l == *dec.l);
    CHECK(*back.u == *dec.u);
    CHECK(back.achieved_rank == 1);
    CHECK(j["instance_hash"] == "h123");
}

TEST_CASE("float decompositions use binary64 round trips") {
    Decomposition<double> dec;
    dec.d = {0.1, 1.0 / 3.0, 1e-17};
    auto j = decomposition_to_json(dec, "");
    auto back = std::get<Decomposition<double>>(
        decomposition_from_json(nlohmann::json::parse(j.dump())));
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.d[i] == dec.d[i]);
}

TEST_CASE("matrix text format round trips") {
    SymMat<Rational> m(3);
    m.set(0, 0, Rational(1));
    m.set(1, 0, Rational(-2, 3));
    m.set(2, 2, Rational(7));
    auto text = matrix_to_text(m);
    std::istringstream in(text);
    auto back = std::get<SymMat<Rational>>(read_matrix_text(in));
    CHECK(back == m);

    SymMat<double> f(2);
    f.set(0, 0, 0.25);
    f.set(1, 0, -1.0 / 3.0);
    std::istringstream fin(matrix_to_text(f));
    auto fback = std::get<SymMat<double>>(read_matrix_text(fin));
    CHECK(fback == f);
}

TEST_CASE("json array-of-arrays matrix input") {
    std::istringstream in("[[0, \"1/2\"], [\"1/2\", 0]]");
    auto m = std::get<SymMat<Rational>>(read_matrix_text(in));
    CHECK(m(0, 1) == Rational(1, 2));
}

TEST_CASE("content hash is stable and collision-sensitive") {
    nlohmann::json a = {{"x", 1}, {"y", 2}};
    nlohmann::json b = {{"y", 2}, {"x", 1}};
    CHECK(content_hash(a) == content_hash(b));  // key order canonicalized
    nlohmann::json c = {{"x", 1}, {"y", 3}};
    CHECK(content_hash(a) != content_hash(c));
}

TEST_CASE("partial matrix JSON round trip") {
    PartialMatrix pm;
    pm.n = 3;
    pm.specified[{0, 1}] = Rational(1);
    pm.specified[{1, 2}] = Rational(-2, 5);
    auto back = partial_matrix_from_json(partial_matrix_to_json(pm));
    CHECK(back.n == 3);
    CHECK(back.specified == pm.specified);
}

TEST_CASE("schema violations raise ParseError") {
    nlohmann::json j;
    j["kind"] = "P2";
    j["mode"] = "exact";
    j["n"] = 2;
    j["matrix"] = {"0", "1"};  // wrong count
    j["r"] = 1;
    CHECK_THROWS_AS(instance_from_json(j), ParseError);

    j["matrix"] = {"0", "1", "0"};
    j["kind"] = "P9";
    CHECK_THROWS_AS(instance_from_json(j), ParseError);
}
