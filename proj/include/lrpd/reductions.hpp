#pragma once

#include <array>
#include <map>

#include "lrpd/graph.hpp"
#include "lrpd/instance.hpp"
#include "lrpd/poly.hpp"

namespace lrpd {

using Coloring = std::vector<int>;  // vertex -> {1,2,3}

bool coloring_is_proper(const Graph& g, const Coloring& c);

// ---------------------------------------------------------------------------
// Graph gadgets

// Adds the triangular-prism gadget between every pair of distinct vertices:
// |V'| = |V| + 2|V|(|V|-1), |E'| = |E| + (9/2)|V|(|V|-1). 3-colorability is
// preserved in both directions.
Graph peeters_supergraph(const Graph& g);
// Extends a proper 3-coloring of g across the prism gadgets.
Coloring extend_coloring_to_peeters(const Graph& g, const Coloring& c);

// Robust-coloring amplifier: every vertex becomes a complete 3-partite gadget
// on 3(c+1) nodes with one exposed partition; each original edge becomes
// (c+1)^2 edges between exposed partitions. Non-3-colorability survives the
// deletion of any c vertices.
Graph robustify(const Graph& g, std::size_t c);
Coloring extend_coloring_to_robustified(const Graph& g, const Coloring& c, std::size_t c_param);

// ---------------------------------------------------------------------------
// Section-3 constructions

struct P3Construction {
    Instance<Rational> inst;  // A = I (x) ones(3) - I, pattern X, r = 3
    Graph input;              // graph handed in
    Graph compiled_on;        // after the optional Peeters stage
    bool peeters_applied = true;

    // coloring of `input`; extended internally when Peeters was applied
    Decomposition<Rational> forward_witness(const Coloring& coloring) const;
};
P3Construction build_p3_instance(const Graph& g, bool apply_peeters = true);

struct P1P2Construction {
    Instance<Rational> inst;  // B (with +kI for P1), r = m + 3, arrow block m
    Graph input;
    Graph compiled_on;
    bool peeters_applied = true;
    bool p1 = true;
    std::size_t m = 0;          // edges of G'' = 9 * nonedges(compiled_on)
    long kconst = 0;            // 2 max degree + 1 (P1; 0 for P2)
    // G'' edges as row pairs of the A block, nonedge-major then (mu,nu)
    std::vector<std::pair<std::size_t, std::size_t>> gpp_edges;

    Decomposition<Rational> forward_witness(const Coloring& coloring) const;
};
P1P2Construction build_p1_instance(const Graph& g, bool apply_peeters = true);
P1P2Construction build_p2_instance(const Graph& g, bool apply_peeters = true);

// ---------------------------------------------------------------------------
// (P3) -> (P2) compiler

template <class T>
struct P3ToP2 {
    Instance<T> p2;   // B in S^{2m+n}, target rank 2m + r
    Pattern xc;       // complement pairs, lexicographic; defines column order
    Mat<T> node_edge;  // K in {0,1}^{n x m}
    Mat<T> node_arc;   // Kbar in {-1,0,1}^{n x m}, tail = smaller index

    // (i) => (ii): R fitting X with A + R PSD of rank <= r maps to [u;v;d]
    std::vector<T> forward(const SymMat<T>& r_fill) const;
    // (ii) => (i): extract R from a feasible diagonal of the compiled instance
    SymMat<T> backward(const std::vector<T>& uvd) const;
};
P3ToP2<Rational> reduce_p3_to_p2(const Instance<Rational>& p3);
P3ToP2<double> reduce_p3_to_p2(const Instance<double>& p3);

// ---------------------------------------------------------------------------
// Section-4 compiler (polynomial systems -> rank-3 PSD completion)

struct PartialMatrix {
    std::size_t n = 0;
    // specified entries, i <= j; the diagonal is never specified here
    std::map<std::pair<std::size_t, std::size_t>, Rational> specified;
};

std::vector<Poly> shitov_sigma(const PolySystem& f);
// 3-vectors over sigma with at least one entry equal to +-1
std::vector<std::array<Poly, 3>> build_H(const PolySystem& f);

struct ShitovConstruction {
    PolySystem f;
    std::vector<Poly> sigma;
    std::vector<std::array<std::size_t, 3>> hbar;  // triples as sigma indices; E copies last
    std::size_t h_size = 0;                        // |H| before the E extension
    std::array<std::size_t, 9> identity_columns{}; // the three copies of each e_i
    PartialMatrix bbar;

    std::size_t n() const { return hbar.size(); }
    // Ubar[xi]: 3 x |Hbar| numeric factor
    Mat<Rational> factor_at(const std::vector<Rational>& xi) const;
    // completion entry (u,v) at xi
    Rational completion_entry(std::size_t u, std::size_t v,
                              const std::vector<Rational>& xi) const;
    // dense P3 instance (large for big systems; built on demand)
    Instance<Rational> p3_instance() const;
    Decomposition<Rational> forward_witness(const std::vector<Rational>& xi) const;
};
ShitovConstruction build_bbar(const PolySystem& f);

// doubly-exponential chain x_1 = 2, x_t = x_{t-1}^2
PolySystem chain_system(std::size_t n);

// ---------------------------------------------------------------------------
// Appendix construction for the perturbed (P2)

struct AppendixParams {
    double eps = 1e-6;
    double phat = 1.0;   // the p(9 mbar + 3n) value used as \hat p
    double s = 1e4;
    double eps0 = 1e-12;  // universal constant, configuration parameter
    double delta = 0.0;   // derived
    std::size_t mbar = 0;
    std::size_t nverts = 0;
};

struct AppendixWitness {
    std::vector<double> d;  // 9 mbar + 3n
    SymMat<double> h;       // zero outside the lower-right block
    double hnorm = 0.0;
};

struct AppendixConstruction {
    Instance<double> inst;  // B, r = 9 mbar + 3, eps carried
    AppendixParams params;
    Graph graph;
    Mat<double> k;          // 3n x 9 mbar
    SymMat<double> dblock;  // D: off-diagonal -2 phat eps

    AppendixWitness forward_witness(const Coloring& coloring) const;
    // re-checks every "s sufficiently large" inequality used by the forward
    // argument; returns violation messages (empty = all pass)
    std::vector<std::string> validate(const AppendixWitness* w = nullptr) const;
};
struct EpsOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct STooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
AppendixConstruction appendix_p2tilde_instance(const Graph& g, double eps, double phat, double s,
                                               double eps0 = 1e-12);

}  // namespace lrpd
