#include "lrpd/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lrpd {

bool coloring_is_proper(const Graph& g, const Coloring& c) {
    if (c.size() != g.vertex_count()) return false;
    for (int v : c)
        if (v < 1 || v > 3) return false;
    for (auto [u, v] : g.edges())
        if (c[u] == c[v]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Peeters supergraph

Graph peeters_supergraph(const Graph& g) {
    const std::size_t n = g.vertex_count();
    Graph out(n + 2 * n * (n - 1));
    for (auto [u, v] : g.edges()) out.add_edge(u, v);
    std::size_t next = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t a = next, b = next + 1, c = next + 2, d = next + 3;
            next += 4;
            out.add_edge(i, a);
            out.add_edge(i, b);
            out.add_edge(a, b);
            out.add_edge(j, c);
            out.add_edge(j, d);
            out.add_edge(c, d);
            out.add_edge(a, j);
            out.add_edge(i, d);
            out.add_edge(b, c);
        }
    return out;
}

Coloring extend_coloring_to_peeters(const Graph& g, const Coloring& c) {
    if (!coloring_is_proper(g, c))
        throw std::invalid_argument("extend_coloring_to_peeters: improper coloring");
    const std::size_t n = g.vertex_count();
    Coloring out = c;
    out.resize(n + 2 * n * (n - 1), 0);
    std::size_t next = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t a = next, b = next + 1, cc = next + 2, d = next + 3;
            next += 4;
            bool found = false;
            for (int ca = 1; ca <= 3 && !found; ++ca)
                for (int cb = 1; cb <= 3 && !found; ++cb)
                    for (int ccv = 1; ccv <= 3 && !found; ++ccv)
                        for (int cd = 1; cd <= 3 && !found; ++cd) {
                            if (ca == c[i] || cb == c[i] || ca == cb) continue;      // i-a, i-b, a-b
                            if (ccv == c[j] || cd == c[j] || ccv == cd) continue;    // j-c, j-d, c-d
                            if (ca == c[j] || cd == c[i] || cb == ccv) continue;     // a-j, i-d, b-c
                            out[a] = ca;
                            out[b] = cb;
                            out[cc] = ccv;
                            out[d] = cd;
                            found = true;
                        }
            if (!found)
                throw std::logic_error("extend_coloring_to_peeters: prism extension failed");
        }
    return out;
}

// ---------------------------------------------------------------------------
// Robust-coloring amplifier

Graph robustify(const Graph& g, std::size_t c) {
    const std::size_t n = g.vertex_count();
    const std::size_t gadget = 3 * (c + 1);
    Graph out(n * gadget);
    auto node = [&](std::size_t v, std::size_t part, std::size_t t) {
        return v * gadget + part * (c + 1) + t;
    };
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t q = p + 1; q < 3; ++q)
                for (std::size_t s = 0; s <= c; ++s)
                    for (std::size_t t = 0; t <= c; ++t) out.add_edge(node(v, p, s), node(v, q, t));
    // partition 0 is exposed
    for (auto [u, v] : g.edges())
        for (std::size_t s = 0; s <= c; ++s)
            for (std::size_t t = 0; t <= c; ++t) out.add_edge(node(u, 0, s), node(v, 0, t));
    return out;
}

Coloring extend_coloring_to_robustified(const Graph& g, const Coloring& c, std::size_t c_param) {
    if (!coloring_is_proper(g, c))
        throw std::invalid_argument("extend_coloring_to_robustified: improper coloring");
    const std::size_t gadget = 3 * (c_param + 1);
    Coloring out(g.vertex_count() * gadget, 0);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        int exposed = c[v];
        int others[2];
        int o = 0;
        for (int col = 1; col <= 3; ++col)
            if (col != exposed) others[o++] = col;
        for (std::size_t t = 0; t <= c_param; ++t) {
            out[v * gadget + 0 * (c_param + 1) + t] = exposed;
            out[v * gadget + 1 * (c_param + 1) + t] = others[0];
            out[v * gadget + 2 * (c_param + 1) + t] = others[1];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// (P3) input construction

P3Construction build_p3_instance(const Graph& g, bool apply_peeters) {
    P3Construction out;
    out.input = g;
    out.peeters_applied = apply_peeters;
    out.compiled_on = apply_peeters ? peeters_supergraph(g) : g;
    const Graph& h = out.compiled_on;
    const std::size_t nv = h.vertex_count();
    const std::size_t n = 3 * nv;

    SymMat<Rational> a(n);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < mu; ++nu) a.set(3 * i + mu, 3 * i + nu, Rational(1));

    Pattern x;
    for (auto [i, j] : h.edges())
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < 3; ++nu) x.push_back({3 * i + mu, 3 * j + nu});
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = mu + 1; nu < 3; ++nu) x.push_back({3 * i + mu, 3 * i + nu});
    std::sort(x.begin(), x.end());

    // A is supported inside the diagonal 3x3 blocks, i.e. exactly on part of X
    out.inst.kind = ProblemKind::P3;
    out.inst.a = std::move(a);
    out.inst.pattern = std::move(x);
    out.inst.r = 3;
    out.inst.provenance = "p3-construction";
    out.inst.validate();
    return out;
}

Decomposition<Rational> P3Construction::forward_witness(const Coloring& coloring) const {
    Coloring full =
        peeters_applied ? extend_coloring_to_peeters(input, coloring) : coloring;
    if (!coloring_is_proper(compiled_on, full))
        throw std::invalid_argument("P3 witness: improper coloring");

    const std::size_t nv = compiled_on.vertex_count();
    const std::size_t n = 3 * nv;
    SymMat<Rational> l(n);
    for (std::size_t t = 0; t < n; ++t) l.set(t, t, Rational(1));
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = i + 1; j < nv; ++j) {
            if (compiled_on.has_edge(i, j)) continue;
            if (full[i] != full[j]) continue;
            for (std::size_t mu = 0; mu < 3; ++mu)
                for (std::size_t nu = 0; nu < 3; ++nu)
                    l.set(3 * i + mu, 3 * j + nu, Rational(1));
        }

    Decomposition<Rational> dec;
    dec.l = std::move(l);
    // completion is the Gram matrix of the color indicators
    Mat<Rational> u(n, 3);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t mu = 0; mu < 3; ++mu) u(3 * i + mu, full[i] - 1) = Rational(1);
    dec.u = std::move(u);
    dec.achieved_rank = 3;
    return dec;
}

// ---------------------------------------------------------------------------
// (P1)/(P2) input constructions

namespace {

struct ABlock {
    SymMat<Rational> a;  // 3|V| x 3|V|
    std::vector<std::pair<std::size_t, std::size_t>> nonedges;
};

ABlock build_a_block(const Graph& h) {
    const std::size_t nv = h.vertex_count();
    const std::size_t n = 3 * nv;
    ABlock out;
    out.a = SymMat<Rational>(n);
    out.nonedges = h.nonedges();
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < mu; ++nu)
                out.a.set(3 * i + mu, 3 * i + nu, Rational(1));
    for (auto [i, j] : out.nonedges)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < 3; ++nu)
                out.a.set(3 * i + mu, 3 * j + nu, Rational(2));
    return out;
}

P1P2Construction build_p1p2(const Graph& g, bool apply_peeters, bool p1) {
    P1P2Construction out;
    out.input = g;
    out.peeters_applied = apply_peeters;
    out.compiled_on = apply_peeters ? peeters_supergraph(g) : g;
    out.p1 = p1;
    const Graph& h = out.compiled_on;
    ABlock ab = build_a_block(h);
    const std::size_t n = 3 * h.vertex_count();

    for (auto [i, j] : ab.nonedges)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < 3; ++nu)
                out.gpp_edges.push_back({3 * i + mu, 3 * j + nu});
    out.m = out.gpp_edges.size();

    // degree in G'' and k = 2 max degree + 1
    std::vector<std::size_t> deg(n, 0);
    for (auto [u, v] : out.gpp_edges) {
        ++deg[u];
        ++deg[v];
    }
    std::size_t maxdeg = 0;
    for (auto d : deg) maxdeg = std::max(maxdeg, d);
    out.kconst = p1 ? static_cast<long>(2 * maxdeg + 1) : 0;

    const std::size_t total = out.m + n;
    SymMat<Rational> b(total);
    for (std::size_t e = 0; e < out.m; ++e) {
        b.set(out.m + out.gpp_edges[e].first, e, Rational(1));
        b.set(out.m + out.gpp_edges[e].second, e, Rational(1));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (!ab.a(i, j).is_zero()) b.set(out.m + i, out.m + j, ab.a(i, j));
    if (p1)
        for (std::size_t t = 0; t < total; ++t) b.set(t, t, Rational(out.kconst));

    out.inst.kind = p1 ? ProblemKind::P1 : ProblemKind::P2;
    out.inst.a = std::move(b);
    out.inst.r = out.m + 3;
    out.inst.arrow_block = out.m;
    out.inst.provenance = p1 ? "p1-construction" : "p2-construction";
    out.inst.validate();
    return out;
}

}  // namespace

P1P2Construction build_p1_instance(const Graph& g, bool apply_peeters) {
    return build_p1p2(g, apply_peeters, true);
}
P1P2Construction build_p2_instance(const Graph& g, bool apply_peeters) {
    return build_p1p2(g, apply_peeters, false);
}

Decomposition<Rational> P1P2Construction::forward_witness(const Coloring& coloring) const {
    Coloring full =
        peeters_applied ? extend_coloring_to_peeters(input, coloring) : coloring;
    if (!coloring_is_proper(compiled_on, full))
        throw std::invalid_argument("P1/P2 witness: improper coloring");

    const std::size_t n = 3 * compiled_on.vertex_count();
    auto parent_color = [&](std::size_t row) { return full[row / 3]; };

    std::vector<Rational> d(m + n, Rational(0));
    // n1/n2: incident edges of G'' with same/different parent colors
    std::vector<std::size_t> n1(n, 0), n2(n, 0);
    for (std::size_t e = 0; e < m; ++e) {
        auto [u, v] = gpp_edges[e];
        bool same = parent_color(u) == parent_color(v);
        if (same) {
            ++n1[u];
            ++n1[v];
        } else {
            ++n2[u];
            ++n2[v];
        }
        if (p1)
            d[e] = same ? Rational(kconst - 1) : Rational(kconst) - Rational(1, 2);
        else
            d[e] = same ? Rational(1) : Rational(1, 2);
    }
    for (std::size_t i = 0; i < n; ++i) {
        long inner = static_cast<long>(n1[i] + 2 * n2[i]);
        d[m + i] = p1 ? Rational(kconst - 1 - inner) : Rational(1 + inner);
    }

    Decomposition<Rational> dec;
    dec.d = std::move(d);
    dec.achieved_rank = m + 3;
    return dec;
}

// ---------------------------------------------------------------------------
// (P3) -> (P2)

namespace {

template <class T>
P3ToP2<T> reduce_p3_to_p2_impl(const Instance<T>& p3) {
    if (p3.kind != ProblemKind::P3) throw std::invalid_argument("reduce_p3_to_p2: wrong kind");
    p3.validate();
    P3ToP2<T> out;
    out.xc = p3.free_pairs();
    const std::size_t n = p3.a.n();
    const std::size_t m = out.xc.size();

    out.node_edge = Mat<T>(n, m);
    out.node_arc = Mat<T>(n, m);
    for (std::size_t e = 0; e < m; ++e) {
        auto [i, j] = out.xc[e];  // i < j; tail = smaller index
        out.node_edge(i, e) = T(1);
        out.node_edge(j, e) = T(1);
        out.node_arc(i, e) = T(-1);
        out.node_arc(j, e) = T(1);
    }

    SymMat<T> b(2 * m + n);
    for (std::size_t e = 0; e < m; ++e) {
        auto [i, j] = out.xc[e];
        b.set(2 * m + i, e, T(1));
        b.set(2 * m + j, e, T(1));
        b.set(2 * m + i, m + e, T(-1));
        b.set(2 * m + j, m + e, T(1));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (scalar_traits<T>::sign(p3.a(i, j)) != 0) b.set(2 * m + i, 2 * m + j, p3.a(i, j));

    out.p2.kind = ProblemKind::P2;
    out.p2.a = std::move(b);
    out.p2.r = 2 * m + p3.r;
    out.p2.eps = p3.eps;
    out.p2.arrow_block = 2 * m;
    out.p2.provenance = "p3-to-p2";
    out.p2.validate();
    return out;
}

}  // namespace

P3ToP2<Rational> reduce_p3_to_p2(const Instance<Rational>& p3) {
    return reduce_p3_to_p2_impl(p3);
}
P3ToP2<double> reduce_p3_to_p2(const Instance<double>& p3) {
    return reduce_p3_to_p2_impl(p3);
}

template <class T>
std::vector<T> P3ToP2<T>::forward(const SymMat<T>& r_fill) const {
    const std::size_t n = r_fill.n();
    const std::size_t m = xc.size();
    std::vector<T> uvd(2 * m + n, T(0));
    for (std::size_t e = 0; e < m; ++e) {
        auto [i, j] = xc[e];
        T rij = r_fill(i, j);
        T v = T(1) / (scalar_traits<T>::abs(rij) + T(1));
        T u = v / (T(1) - v * rij);
        uvd[e] = u;
        uvd[m + e] = v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        T acc = r_fill(i, i);
        for (std::size_t e = 0; e < m; ++e) {
            if (xc[e].first != i && xc[e].second != i) continue;
            acc += T(1) / uvd[e] + T(1) / uvd[m + e];
        }
        uvd[2 * m + i] = acc;
    }
    return uvd;
}

template <class T>
SymMat<T> P3ToP2<T>::backward(const std::vector<T>& uvd) const {
    const std::size_t m = xc.size();
    const std::size_t n = node_edge.rows();
    if (uvd.size() != 2 * m + n) throw std::invalid_argument("backward: size mismatch");
    SymMat<T> r(n);
    for (std::size_t i = 0; i < n; ++i) r.set(i, i, uvd[2 * m + i]);
    for (std::size_t e = 0; e < m; ++e) {
        auto [i, j] = xc[e];
        const T& u = uvd[e];
        const T& v = uvd[m + e];
        if (scalar_traits<T>::sign(u) == 0 || scalar_traits<T>::sign(v) == 0)
            throw std::invalid_argument("backward: zero diagonal entry for a pattern column");
        // K column contributes 1/u at (i,i),(i,j),(j,j); Kbar contributes
        // 1/v at (i,i),(j,j) and -1/v at (i,j)
        r.at(i, i) -= T(1) / u + T(1) / v;
        r.at(j, j) -= T(1) / u + T(1) / v;
        r.at(i, j) = r(i, j) - (T(1) / u - T(1) / v);
    }
    return r;
}

template struct P3ToP2<Rational>;
template struct P3ToP2<double>;

// ---------------------------------------------------------------------------
// Section 4: sigma, H, Bbar

namespace {

void push_unique(std::vector<Poly>& sigma, const Poly& p) {
    if (std::find(sigma.begin(), sigma.end(), p) == sigma.end()) sigma.push_back(p);
}

}  // namespace

std::vector<Poly> shitov_sigma(const PolySystem& f) {
    const std::size_t nv = f.nvars;
    std::vector<Poly> sigma;
    Poly one = Poly::constant(nv, Rational(1));
    Poly zero(nv);

    for (const Poly& eq : f.equations) {
        // per-monomial sequences
        for (const auto& [expo, coef] : eq.terms()) {
            push_unique(sigma, one);
            push_unique(sigma, -one);
            push_unique(sigma, Poly::constant(nv, coef));
            push_unique(sigma, Poly::constant(nv, -coef));
            Poly prefix = one;
            for (std::size_t v = 0; v < nv; ++v)
                for (unsigned t = 0; t < expo[v]; ++t) {
                    prefix = prefix * Poly::variable(nv, v);
                    push_unique(sigma, prefix);
                    push_unique(sigma, -prefix);
                }
            Poly full(nv);
            full.add_term(expo, coef);
            push_unique(sigma, full);
        }
        // partial sums
        push_unique(sigma, zero);
        Poly sum(nv);
        for (const auto& [expo, coef] : eq.terms()) {
            Poly term(nv);
            term.add_term(expo, coef);
            sum += term;
            push_unique(sigma, sum);
            push_unique(sigma, -sum);
        }
        // all variables
        for (std::size_t v = 0; v < nv; ++v) {
            push_unique(sigma, Poly::variable(nv, v));
            push_unique(sigma, -Poly::variable(nv, v));
        }
    }
    return sigma;
}

std::vector<std::array<Poly, 3>> build_H(const PolySystem& f) {
    auto sigma = shitov_sigma(f);
    const std::size_t s = sigma.size();
    Poly one = Poly::constant(f.nvars, Rational(1));
    Poly mone = -one;
    std::vector<bool> is_unit(s);
    for (std::size_t i = 0; i < s; ++i) is_unit[i] = sigma[i] == one || sigma[i] == mone;

    std::vector<std::array<Poly, 3>> h;
    for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b)
            for (std::size_t c = 0; c < s; ++c)
                if (is_unit[a] || is_unit[b] || is_unit[c])
                    h.push_back({sigma[a], sigma[b], sigma[c]});
    return h;
}

ShitovConstruction build_bbar(const PolySystem& f) {
    ShitovConstruction out;
    out.f = f;
    out.sigma = shitov_sigma(f);
    const std::size_t s = out.sigma.size();
    const std::size_t nv = f.nvars;

    Poly one = Poly::constant(nv, Rational(1));
    Poly zero(nv);
    std::size_t idx_one = s, idx_zero = s;
    std::vector<bool> is_unit(s, false);
    for (std::size_t i = 0; i < s; ++i) {
        if (out.sigma[i] == one) {
            idx_one = i;
            is_unit[i] = true;
        } else if (out.sigma[i] == -one) {
            is_unit[i] = true;
        } else if (out.sigma[i] == zero) {
            idx_zero = i;
        }
    }
    if (idx_one == s || idx_zero == s)
        throw std::logic_error("build_bbar: sigma lost its 0/1 anchors");

    for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b)
            for (std::size_t c = 0; c < s; ++c)
                if (is_unit[a] || is_unit[b] || is_unit[c]) out.hbar.push_back({a, b, c});
    out.h_size = out.hbar.size();

    // identity columns inside H, then the two extra copies of each (the E
    // multiset): grouped e1 e1 e1, e2 e2 e2, e3 e3 e3 for the Bi* blocks
    std::array<std::array<std::size_t, 3>, 3> ecols = {
        std::array<std::size_t, 3>{idx_one, idx_zero, idx_zero},
        std::array<std::size_t, 3>{idx_zero, idx_one, idx_zero},
        std::array<std::size_t, 3>{idx_zero, idx_zero, idx_one}};
    for (std::size_t i = 0; i < 3; ++i) {
        auto it = std::find(out.hbar.begin(), out.hbar.end(), ecols[i]);
        if (it == out.hbar.end()) throw std::logic_error("build_bbar: e_i missing from H");
        out.identity_columns[3 * i] = static_cast<std::size_t>(it - out.hbar.begin());
        out.hbar.push_back(ecols[i]);
        out.identity_columns[3 * i + 1] = out.hbar.size() - 1;
        out.hbar.push_back(ecols[i]);
        out.identity_columns[3 * i + 2] = out.hbar.size() - 1;
    }

    // specified entries of Bbar*: W(u,v) in F -> 0; constant -> the constant;
    // diagonal always unspecified
    const std::size_t big = out.hbar.size();
    out.bbar.n = big;
    std::map<std::pair<std::size_t, std::size_t>, Poly> prod_cache;
    auto product = [&](std::size_t a, std::size_t b) -> const Poly& {
        auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = prod_cache.find(key);
        if (it == prod_cache.end())
            it = prod_cache.emplace(key, out.sigma[key.first] * out.sigma[key.second]).first;
        return it->second;
    };

    for (std::size_t u = 0; u < big; ++u) {
        for (std::size_t v = u + 1; v < big; ++v) {
            Poly w = product(out.hbar[u][0], out.hbar[v][0]) +
                     product(out.hbar[u][1], out.hbar[v][1]) +
                     product(out.hbar[u][2], out.hbar[v][2]);
            bool in_f = false;
            for (const Poly& eq : f.equations)
                if (w == eq) {
                    in_f = true;
                    break;
                }
            if (in_f)
                out.bbar.specified[{u, v}] = Rational(0);
            else if (w.is_constant())
                out.bbar.specified[{u, v}] = w.constant_value();
        }
    }
    return out;
}

Mat<Rational> ShitovConstruction::factor_at(const std::vector<Rational>& xi) const {
    std::vector<Rational> vals(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) vals[i] = sigma[i].eval(xi);
    Mat<Rational> u(3, hbar.size());
    for (std::size_t col = 0; col < hbar.size(); ++col)
        for (std::size_t t = 0; t < 3; ++t) u(t, col) = vals[hbar[col][t]];
    return u;
}

Rational ShitovConstruction::completion_entry(std::size_t u, std::size_t v,
                                              const std::vector<Rational>& xi) const {
    Rational acc(0);
    for (std::size_t t = 0; t < 3; ++t)
        acc += sigma[hbar[u][t]].eval(xi) * sigma[hbar[v][t]].eval(xi);
    return acc;
}

Instance<Rational> ShitovConstruction::p3_instance() const {
    Instance<Rational> inst;
    inst.kind = ProblemKind::P3;
    inst.a = SymMat<Rational>(bbar.n);
    for (const auto& [pair, val] : bbar.specified) {
        inst.a.set(pair.first, pair.second, val);
        inst.pattern.push_back(pair);
    }
    inst.r = 3;
    inst.provenance = "shitov";
    inst.validate();
    return inst;
}

Decomposition<Rational> ShitovConstruction::forward_witness(
    const std::vector<Rational>& xi) const {
    for (const Poly& eq : f.equations)
        if (!eq.eval(xi).is_zero())
            throw std::invalid_argument("shitov witness: xi does not solve the system");
    Mat<Rational> u = factor_at(xi);
    Decomposition<Rational> dec;
    dec.u = u.transposed();  // n x 3
    // L = completion - A (A carries the specified values)
    Mat<Rational> gram = u.transposed() * u;
    SymMat<Rational> l = SymMat<Rational>::lower_of(gram);
    for (const auto& [pair, val] : bbar.specified) {
        l.set(pair.first, pair.second, l(pair.first, pair.second) - val);
    }
    dec.l = std::move(l);
    dec.achieved_rank = 3;
    return dec;
}

PolySystem chain_system(std::size_t n) {
    if (n < 1) throw std::invalid_argument("chain_system: n >= 1");
    PolySystem sys;
    sys.nvars = n;
    sys.equations.push_back(Poly::variable(n, 0) - Poly::constant(n, Rational(2)));
    for (std::size_t t = 1; t < n; ++t) {
        Poly prev = Poly::variable(n, t - 1);
        sys.equations.push_back(Poly::variable(n, t) - prev * prev);
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Appendix construction

AppendixConstruction appendix_p2tilde_instance(const Graph& g, double eps, double phat, double s,
                                               double eps0) {
    if (!(s > 0)) throw std::invalid_argument("appendix: s must be positive");
    if (!(phat >= 1)) throw std::invalid_argument("appendix: phat must be >= 1");
    AppendixConstruction out;
    out.graph = g;
    const std::size_t n = g.vertex_count();
    auto nonedges = g.nonedges();
    const std::size_t mbar = nonedges.size();
    if (mbar == 0) throw std::invalid_argument("appendix: graph has no nonedge");

    out.params.eps = eps;
    out.params.phat = phat;
    out.params.s = s;
    out.params.eps0 = eps0;
    out.params.mbar = mbar;
    out.params.nverts = n;
    double eps_bound = eps0 / (600.0 * mbar * mbar * n * phat);
    if (eps > eps_bound) {
        std::ostringstream os;
        os << "appendix: eps = " << eps << " exceeds the valid range " << eps_bound;
        throw EpsOutOfRange(os.str());
    }
    const double delta =
        eps / (10.0 * 81.0 * std::sqrt(6.0) * static_cast<double>(mbar * mbar) * std::sqrt(n));
    out.params.delta = delta;

    const std::size_t cols = 9 * mbar;
    const std::size_t rows = 3 * n;
    out.k = Mat<double>(rows, cols);
    for (std::size_t e = 0; e < mbar; ++e) {
        auto [i, j] = nonedges[e];
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < 3; ++nu) {
                std::size_t col = 9 * e + 3 * mu + nu;
                for (std::size_t t = 0; t < rows; ++t) out.k(t, col) = s * delta;
                out.k(3 * i + mu, col) = s;
                out.k(3 * j + nu, col) = s;
            }
    }

    out.dblock = SymMat<double>(cols);
    for (std::size_t a = 0; a < cols; ++a)
        for (std::size_t b = 0; b < a; ++b) out.dblock.set(a, b, -2.0 * phat * eps);

    // the A block follows the (P1)/(P2) input construction on g itself
    SymMat<double> bfull(cols + rows);
    for (std::size_t a = 0; a < cols; ++a)
        for (std::size_t b = 0; b < a; ++b) bfull.set(a, b, out.dblock(a, b));
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t c = 0; c < cols; ++c)
            if (out.k(t, c) != 0.0) bfull.set(cols + t, c, out.k(t, c));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < mu; ++nu)
                bfull.set(cols + 3 * i + mu, cols + 3 * i + nu, 1.0);
    for (auto [i, j] : nonedges)
        for (std::size_t mu = 0; mu < 3; ++mu)
            for (std::size_t nu = 0; nu < 3; ++nu)
                bfull.set(cols + 3 * i + mu, cols + 3 * j + nu, 2.0);

    out.inst.kind = ProblemKind::P2;
    out.inst.a = std::move(bfull);
    out.inst.r = cols + 3;
    out.inst.eps = eps;
    out.inst.arrow_block = cols;
    out.inst.provenance = "appendix-p2tilde";
    out.inst.validate();
    return out;
}

AppendixWitness AppendixConstruction::forward_witness(const Coloring& coloring) const {
    if (!coloring_is_proper(graph, coloring))
        throw std::invalid_argument("appendix witness: improper coloring");
    const std::size_t n = params.nverts;
    const std::size_t mbar = params.mbar;
    const std::size_t cols = 9 * mbar;
    const std::size_t rows = 3 * n;
    const double s = params.s;
    auto nonedges = graph.nonedges();

    AppendixWitness w;
    w.d.assign(cols + rows, 0.0);
    for (std::size_t e = 0; e < mbar; ++e) {
        auto [i, j] = nonedges[e];
        double val = coloring[i] != coloring[j] ? s * s / 2.0 : s * s;
        for (std::size_t t = 0; t < 9; ++t) w.d[9 * e + t] = val;
    }

    // S' = A - K (D + Diag(d_E))^{-1} K^T
    SymMat<double> inner(cols);
    for (std::size_t a = 0; a < cols; ++a) {
        for (std::size_t b = 0; b < a; ++b) inner.set(a, b, dblock(a, b));
        inner.set(a, a, w.d[a]);
    }
    Mat<double> inner_inv = inverse(inner);
    // update = K inner_inv K^T
    Mat<double> ki(rows, cols);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t b = 0; b < cols; ++b) {
            double acc = 0;
            for (std::size_t a = 0; a < cols; ++a) acc += k(t, a) * inner_inv(a, b);
            ki(t, b) = acc;
        }
    Mat<double> update(rows, rows);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t u = 0; u <= t; ++u) {
            double acc = kern::dot(ki.row(t), k.row(u), cols);
            update(t, u) = update(u, t) = acc;
        }

    // S'' off-diagonal from the color classes (exact 0/1 pattern)
    auto parent_same = [&](std::size_t a, std::size_t b) {
        return coloring[a / 3] == coloring[b / 3];
    };
    SymMat<double> a_block(rows);
    {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t mu = 0; mu < 3; ++mu)
                for (std::size_t nu = 0; nu < mu; ++nu)
                    a_block.set(3 * i + mu, 3 * i + nu, 1.0);
        for (auto [i, j] : nonedges)
            for (std::size_t mu = 0; mu < 3; ++mu)
                for (std::size_t nu = 0; nu < 3; ++nu)
                    a_block.set(3 * i + mu, 3 * j + nu, 2.0);
    }

    SymMat<double> sprimeprime(rows);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t u = 0; u < t; ++u) {
            double val;
            if (a_block(t, u) == 2.0)
                val = parent_same(t, u) ? 1.0 : 0.0;  // nonedge entries get updated exactly
            else
                val = a_block(t, u);  // edges stay 0, intra-block stays 1
            sprimeprime.set(t, u, val);
        }

    // H3 = (S'' - S') off-diagonal, diagonal 0
    SymMat<double> h3(rows);
    double hsq = 0;
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t u = 0; u < t; ++u) {
            double sprime = a_block(t, u) - update(t, u);
            double v = sprimeprime(t, u) - sprime;
            h3.set(t, u, v);
            hsq += 2 * v * v;
        }
    w.hnorm = std::sqrt(hsq);

    // d_V normalizes the Schur complement diagonal to 1
    for (std::size_t t = 0; t < rows; ++t) {
        double sprime_tt = a_block(t, t) - update(t, t);  // = -update(t,t)
        w.d[cols + t] = 1.0 - sprime_tt;
    }

    w.h = SymMat<double>(cols + rows);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t u = 0; u < t; ++u) w.h.set(cols + t, cols + u, h3(t, u));
    return w;
}

std::vector<std::string> AppendixConstruction::validate(const AppendixWitness* w) const {
    std::vector<std::string> bad;
    const double s = params.s, eps = params.eps, phat = params.phat, delta = params.delta;
    const double mbar = static_cast<double>(params.mbar);
    const double n = static_cast<double>(params.nverts);
    auto expect = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };

    double klg = std::sqrt(18.0 * mbar) * s;
    double ksm_bound = std::sqrt(27.0 * mbar * n) * s * delta;
    double klg_actual = std::sqrt(2.0 * 9.0 * mbar) * s;  // two large entries per column
    double ksm_actual = 0;
    for (std::size_t t = 0; t < k.rows(); ++t)
        for (std::size_t c = 0; c < k.cols(); ++c)
            if (k(t, c) == s * delta) ksm_actual += (s * delta) * (s * delta);
    ksm_actual = std::sqrt(ksm_actual);

    expect(klg_actual <= klg * (1 + 1e-12), "||K_lg|| exceeds sqrt(18 mbar) s");
    expect(ksm_actual <= ksm_bound * (1 + 1e-12), "||K_sm|| exceeds sqrt(27 mbar n) s delta");
    expect(ksm_actual <= klg_actual / 2.0, "perturbation lemma hypothesis ||K_sm|| <= ||K_lg||/2");

    double dinv_bound = 18.0 * mbar / (s * s);
    double dnorm = fro_norm(dblock);
    // off-diagonal entries of D are 2 phat eps over 9m(9m-1) slots:
    // ||D||_F <= 18 mbar phat eps
    expect(dnorm <= 18.0 * mbar * phat * eps * (1 + 1e-12), "||D|| exceeds 18 mbar phat eps");
    expect(dnorm * dinv_bound <= 0.5, "perturbation lemma hypothesis ||D|| ||Diag(dE)^{-1}|| <= 1/2");

    double term1 = 81.0 * 5.0 * std::sqrt(6.0) * mbar * mbar * std::sqrt(n) * delta;
    double term2 = 8.0 * 59049.0 * mbar * mbar * mbar * mbar * phat * eps / (s * s);
    expect(term1 <= eps / 2.0 * (1 + 1e-9), "first Schur perturbation term exceeds eps/2");
    expect(term2 <= eps / 2.0, "second Schur perturbation term exceeds eps/2 (s too small)");

    double eps_bound = params.eps0 / (600.0 * mbar * mbar * n * phat);
    expect(eps <= eps_bound, "eps exceeds its valid range");

    if (w) {
        expect(w->hnorm <= eps, "||H||_F exceeds eps");
        for (std::size_t t = 9 * params.mbar; t < w->d.size(); ++t)
            if (!(w->d[t] > 0)) {
                bad.push_back("d_V has a nonpositive entry");
                break;
            }
        for (std::size_t e = 0; e < 9 * params.mbar; ++e)
            if (!(w->d[e] > 0)) {
                bad.push_back("d_E has a nonpositive entry");
                break;
            }
    }
    return bad;
}

}  // namespace lrpd
