#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrpd/oracle.hpp"
#include "lrpd/solve.hpp"

using namespace lrpd;

namespace {

Instance<Rational> example1_instance(std::size_t r) {
    auto q = [](int v) { return Rational(v); };
    Instance<Rational> inst;
    inst.kind = ProblemKind::P2;
    inst.a = SymMat<Rational>{{q(0), q(1), q(2), q(1), q(0)},
                              {q(1), q(0), q(2), q(0), q(1)},
                              {q(2), q(2), q(0), q(0), q(0)},
                              {q(1), q(0), q(0), q(0), q(1)},
                              {q(0), q(1), q(0), q(1), q(0)}};
    inst.r = r;
    return inst;
}

}  // namespace

TEST_CASE("brute force 3-coloring basics") {
    CHECK(brute_force_3color(Graph::complete(3)).colorable);
    CHECK_FALSE(brute_force_3color(Graph::complete(4)).colorable);
    auto res = brute_force_3color(Graph::path(4));
    REQUIRE(res.colorable);
    CHECK(coloring_is_proper(Graph::path(4), res.coloring));
}

TEST_CASE("peeters supergraph preserves 3-colorability both ways") {
    // positive side
    auto gp3 = peeters_supergraph(Graph::complete(3));
    CHECK(brute_force_3color(gp3).colorable);
    // negative side
    auto gp4 = peeters_supergraph(Graph::complete(4));
    CHECK_FALSE(brute_force_3color(gp4).colorable);
    // exhaustive over all labeled graphs on <= 3 vertices
    for (std::size_t n = 1; n <= 3; ++n) {
        auto pairs = Graph::complete(n).edges();
        for (std::size_t mask = 0; mask < (1u << pairs.size()); ++mask) {
            Graph g(n);
            for (std::size_t e = 0; e < pairs.size(); ++e)
                if (mask & (1u << e)) g.add_edge(pairs[e].first, pairs[e].second);
            CHECK(brute_force_3color(g).colorable ==
                  brute_force_3color(peeters_supergraph(g)).colorable);
        }
    }
}

TEST_CASE("robustified K4 stays non-3-colorable after any single deletion") {
    auto rg = robustify(Graph::complete(4), 1);
    REQUIRE_FALSE(brute_force_3color(rg).colorable);
    for (std::size_t skip = 0; skip < rg.vertex_count(); ++skip) {
        // induced subgraph without vertex `skip`
        Graph sub(rg.vertex_count() - 1);
        auto remap = [&](std::size_t v) { return v < skip ? v : v - 1; };
        for (auto [u, v] : rg.edges()) {
            if (u == skip || v == skip) continue;
            sub.add_edge(remap(u), remap(v));
        }
        CHECK_FALSE(brute_force_3color(sub).colorable);
    }
}

TEST_CASE("size cap is enforced") {
    CHECK_THROWS_AS(brute_force_3color(Graph::complete(40)), SizeCap);
}

TEST_CASE("rank probe on example-1 at rank 2 never verifies, best is 3") {
    auto inst = example1_instance(2);
    auto rep = rank_probe(inst, 2, 10000, 20240811);
    CHECK(rep.best_rank_found == 3);
    CHECK(rep.verified_at_target == 0);
    CHECK(rep.trials == 10000);
}

TEST_CASE("rank probe finds the all-ones completion at rank 1") {
    Instance<Rational> inst;
    inst.kind = ProblemKind::P2;
    inst.a = SymMat<Rational>(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j) inst.a.set(i, j, Rational(1));
    inst.r = 1;
    auto rep = rank_probe(inst, 1, 2000, 5);
    CHECK(rep.best_rank_found == 1);
    CHECK(rep.ever_verified());
    REQUIRE(rep.best_d.size() == 3);
    for (double v : rep.best_d) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("rank probe finds a planted rank-2 completion via lattice enumeration") {
    // planted d* in {0..3}^4 so the coarse enumeration hits it exactly
    Mat<Rational> u{{Rational(1), Rational(0)},
                    {Rational(0), Rational(1)},
                    {Rational(1), Rational(1)},
                    {Rational(1), Rational(-1)}};
    auto g = SymMat<Rational>::lower_of(u * u.transposed());
    Instance<Rational> inst;
    inst.kind = ProblemKind::P2;
    inst.a = g;
    inst.r = 2;
    for (std::size_t i = 0; i < 4; ++i) inst.a.set(i, i, Rational(0));
    auto rep = rank_probe(inst, 2, 2000, 6);
    CHECK(rep.best_rank_found == 2);
    CHECK(rep.ever_verified());
}

TEST_CASE("perturbation lemma sampling: zero violations") {
    auto rep = check_perturbation_lemmas(100, 20240810);
    for (const auto& n : rep.notes) MESSAGE(n);
    CHECK(rep.violations == 0);
    CHECK(rep.trials >= 300);
}

TEST_CASE("small completion search: the Bi* pattern completes uniquely at the ones") {
    PartialMatrix pm;
    pm.n = 3;
    pm.specified[{0, 1}] = Rational(1);
    pm.specified[{0, 2}] = Rational(1);
    pm.specified[{1, 2}] = Rational(1);
    auto res = small_completion_search(pm, 1);
    CHECK(res.score <= 1e-8);
    CHECK(res.psd);
    CHECK(res.rank == 1);
    REQUIRE(res.unknown_values.size() == 3);  // the three diagonal stars
    for (double v : res.unknown_values) CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("small completion search: fully specified PSD matrix is returned as-is") {
    PartialMatrix pm;
    pm.n = 2;
    pm.specified[{0, 0}] = Rational(2);
    pm.specified[{0, 1}] = Rational(1);
    pm.specified[{1, 1}] = Rational(2);
    auto res = small_completion_search(pm, 2);
    CHECK(res.unknown_positions.empty());
    CHECK(res.psd);
    CHECK(res.rank == 2);
}

TEST_CASE("small completion search on [[*,1],[1,*]] at rank 1 reaches the family") {
    PartialMatrix pm;
    pm.n = 2;
    pm.specified[{0, 1}] = Rational(1);
    auto res = small_completion_search(pm, 1);
    CHECK(res.score <= 1e-8);
    CHECK(res.psd);
    CHECK(res.rank == 1);
    // every rank-1 PSD completion has ad = 1 with a > 0
    CHECK(res.unknown_values[0] * res.unknown_values[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(res.unknown_values[0] > 0);
}

TEST_CASE("too many unknowns is rejected") {
    PartialMatrix pm;
    pm.n = 4;  // 10 unknowns
    CHECK_THROWS_AS(small_completion_search(pm, 1), TooManyUnknowns);
}

TEST_CASE("oracle colorability agrees with witness existence on tiny graphs") {
    for (std::size_t n = 1; n <= 3; ++n) {
        auto pairs = Graph::complete(n).edges();
        for (std::size_t mask = 0; mask < (1u << pairs.size()); ++mask) {
            Graph g(n);
            for (std::size_t e = 0; e < pairs.size(); ++e)
                if (mask & (1u << e)) g.add_edge(pairs[e].first, pairs[e].second);
            auto color = brute_force_3color(g);
            REQUIRE(color.colorable);  // everything on <= 3 vertices is 3-colorable
            auto con = build_p3_instance(g);
            auto dec = con.forward_witness(color.coloring);
            CHECK(verify(con.inst, dec).pass);
        }
    }
}
