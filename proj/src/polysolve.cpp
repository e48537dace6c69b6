#include "lrpd/polysolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace lrpd {

std::optional<Rational> exact_sqrt(const Rational& x) {
    if (x.sign() < 0) return std::nullopt;
    if (x.is_zero()) return Rational(0);
    mpz_class num = x.raw().get_num(), den = x.raw().get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t())) {
        mpz_class rn, rd;
        mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
        return Rational(mpq_class(rn) / mpq_class(rd));
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// System assembly

namespace {

Mat<Poly> symbolic_v(std::size_t r, std::size_t nvars) {
    Mat<Poly> v(r, r);
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = 0; q < r; ++q) v(p, q) = Poly::variable(nvars, svec_index(p, q));
    return v;
}

Mat<Poly> leading_block(const Mat<Poly>& v, std::size_t k) {
    Mat<Poly> b(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) b(i, j) = v(i, j);
    return b;
}

void append_linear_rows(PolySystem& sys, const Mat<Rational>& lhs,
                        const std::vector<Rational>& rhs) {
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        Poly p(sys.nvars);
        for (std::size_t c = 0; c < lhs.cols(); ++c) {
            if (lhs(i, c).is_zero()) continue;
            Poly::Expo e(sys.nvars, 0);
            e[c] = 1;
            p.add_term(e, lhs(i, c));
        }
        p.add_term(Poly::Expo(sys.nvars, 0), -rhs[i]);
        sys.equations.push_back(p);
    }
}

void name_svec_z(PolySystem& sys, std::size_t r, std::size_t extra_y) {
    const std::size_t nv = r * (r + 1) / 2;
    sys.var_names.resize(sys.nvars);
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = 0; q <= p; ++q)
            sys.var_names[svec_index(p, q)] =
                "V" + std::to_string(p + 1) + std::to_string(q + 1);
    for (std::size_t k = 0; k < r; ++k) sys.var_names[nv + k] = "z" + std::to_string(k + 1);
    for (std::size_t k = 0; k < extra_y; ++k)
        sys.var_names[nv + r + k] = "y" + std::to_string(k + 1);
}

}  // namespace

PolySystem assemble_inner2(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                           const Mat<Rational>& lhs, const std::vector<Rational>& rhs) {
    const std::size_t r = j.size();
    const std::size_t nv = r * (r + 1) / 2;
    if (lhs.cols() != nv) throw std::invalid_argument("assemble_inner2: lhs column mismatch");
    if (lhs.rows() != rhs.size()) throw std::invalid_argument("assemble_inner2: rhs mismatch");

    PolySystem sys;
    sys.nvars = nv + r;
    name_svec_z(sys, r, 0);
    for (std::size_t k = 0; k < r; ++k) sys.sign_canonical_vars.push_back(nv + k);
    append_linear_rows(sys, lhs, rhs);

    Mat<Poly> v = symbolic_v(r, sys.nvars);
    Poly detv = det_cofactor(v);
    Mat<Poly> adj = adjugate_cofactor(v);
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = p + 1; q < r; ++q)
            sys.equations.push_back(detv * a(j[p], j[q]) - adj(p, q));

    for (std::size_t k = 1; k <= r; ++k) {
        Poly detk = det_cofactor(leading_block(v, k));
        Poly zk = Poly::variable(sys.nvars, nv + (k - 1));
        sys.equations.push_back(detk * zk * zk - Poly::constant(sys.nvars, Rational(1)));
    }
    return sys;
}

PolySystem assemble_inner2_p1(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                              const Mat<Rational>& lhs, const std::vector<Rational>& rhs,
                              const Mat<Rational>& divi_coeffs,
                              const std::vector<Rational>& divi_const,
                              const std::vector<std::size_t>& facet_rows) {
    const std::size_t r = j.size();
    const std::size_t nv = r * (r + 1) / 2;
    PolySystem sys;
    sys.nvars = nv + 2 * r;
    name_svec_z(sys, r, r);
    for (std::size_t k = 0; k < 2 * r; ++k) sys.sign_canonical_vars.push_back(nv + k);
    append_linear_rows(sys, lhs, rhs);

    Mat<Poly> v = symbolic_v(r, sys.nvars);
    Poly detv = det_cofactor(v);
    Mat<Poly> adj = adjugate_cofactor(v);
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = p + 1; q < r; ++q)
            sys.equations.push_back(detv * a(j[p], j[q]) - adj(p, q));

    for (std::size_t k = 1; k <= r; ++k) {
        Poly detk = det_cofactor(leading_block(v, k));
        Poly zk = Poly::variable(sys.nvars, nv + (k - 1));
        sys.equations.push_back(detk * zk * zk - Poly::constant(sys.nvars, Rational(1)));
    }

    // diagonal equations on J: adj(V)(p,p) = (A_pp - y_p^2) det(V)
    for (std::size_t p = 0; p < r; ++p) {
        Poly yp = Poly::variable(sys.nvars, nv + r + p);
        Poly want = Poly::constant(sys.nvars, a(j[p], j[p])) - yp * yp;
        sys.equations.push_back(adj(p, p) - detv * want);
    }

    // appended nonnegativity facets d_i(V) = 0 (affine rows of the family)
    for (auto row : facet_rows) {
        Poly p(sys.nvars);
        for (std::size_t c = 0; c < nv; ++c) {
            if (divi_coeffs(row, c).is_zero()) continue;
            Poly::Expo e(sys.nvars, 0);
            e[c] = 1;
            p.add_term(e, divi_coeffs(row, c));
        }
        p.add_term(Poly::Expo(sys.nvars, 0), -divi_const[row]);
        sys.equations.push_back(-p);  // d_i(V) = const - coeffs.svec = 0
    }
    return sys;
}

// ---------------------------------------------------------------------------
// solve_system

namespace {

struct SignCond {
    Poly q;
    int sign;  // required sign of q at a solution
};

struct Elim {
    enum class Type { affine, sqrt_principal };
    Type type;
    std::size_t var;
    Poly expr;      // affine: v = expr; sqrt: v = sqrt(cval / expr)
    Rational cval;
};

struct Prepped {
    std::vector<Poly> eqs;
    std::vector<char> active;
    std::vector<Elim> stack;
    std::vector<SignCond> conds;
    bool infeasible = false;
};

// split e = Q * v^2 + R with v absent from Q and R; false if e has odd powers
bool split_square(const Poly& e, std::size_t v, Poly& q, Poly& rest) {
    q = Poly(e.nvars());
    rest = Poly(e.nvars());
    for (const auto& [expo, c] : e.terms()) {
        if (expo[v] == 0) {
            rest.add_term(expo, c);
        } else if (expo[v] == 2) {
            Poly::Expo base = expo;
            base[v] = 0;
            q.add_term(base, c);
        } else {
            return false;
        }
    }
    return !q.is_zero();
}

Prepped preprocess(const PolySystem& sys) {
    Prepped p;
    p.active.assign(sys.nvars, 1);
    for (const auto& e : sys.equations)
        if (!e.is_zero()) p.eqs.push_back(e);

    bool changed = true;
    while (changed) {
        changed = false;

        // constants and zero rows
        for (std::size_t i = 0; i < p.eqs.size();) {
            if (p.eqs[i].is_zero()) {
                p.eqs.erase(p.eqs.begin() + i);
                continue;
            }
            if (p.eqs[i].is_constant()) {
                p.infeasible = true;
                return p;
            }
            ++i;
        }

        // affine elimination
        for (std::size_t i = 0; i < p.eqs.size(); ++i) {
            if (!p.eqs[i].is_affine()) continue;
            Rational c0;
            std::vector<Rational> coeffs;
            p.eqs[i].affine_parts(c0, coeffs);
            std::size_t var = sys.nvars;
            for (std::size_t v = 0; v < sys.nvars; ++v)
                if (!coeffs[v].is_zero()) {
                    var = v;
                    break;
                }
            if (var == sys.nvars) continue;  // constant, handled next sweep
            // v = -(c0 + sum_{w != v} c_w x_w) / c_v
            Poly expr(sys.nvars);
            expr.add_term(Poly::Expo(sys.nvars, 0), -c0 / coeffs[var]);
            for (std::size_t w = 0; w < sys.nvars; ++w) {
                if (w == var || coeffs[w].is_zero()) continue;
                Poly::Expo e(sys.nvars, 0);
                e[w] = 1;
                expr.add_term(e, -coeffs[w] / coeffs[var]);
            }
            p.eqs.erase(p.eqs.begin() + i);
            for (auto& e : p.eqs) e = e.substitute(var, expr);
            for (auto& c : p.conds) c.q = c.q.substitute(var, expr);
            p.stack.push_back({Elim::Type::affine, var, expr, Rational(0)});
            p.active[var] = 0;
            changed = true;
            break;
        }
        if (changed) continue;

        // square-variable elimination: v appears in exactly one equation, only
        // as v^2, against a nonzero constant
        for (std::size_t v = 0; v < sys.nvars; ++v) {
            if (!p.active[v]) continue;
            std::size_t count = 0, at = 0;
            for (std::size_t i = 0; i < p.eqs.size(); ++i)
                if (p.eqs[i].uses_var(v)) {
                    ++count;
                    at = i;
                }
            if (count != 1) continue;
            Poly q, rest;
            if (!split_square(p.eqs[at], v, q, rest)) continue;
            if (!rest.is_constant()) continue;
            Rational c = -rest.constant_value();
            if (c.is_zero()) continue;
            p.conds.push_back({q, c.sign()});
            p.stack.push_back({Elim::Type::sqrt_principal, v, q, c});
            p.eqs.erase(p.eqs.begin() + at);
            p.active[v] = 0;
            changed = true;
            break;
        }
    }
    return p;
}

std::optional<Rational> eval_exact(const Poly& p,
                                   const std::vector<std::optional<Rational>>& x) {
    Rational acc(0);
    for (const auto& [e, c] : p.terms()) {
        Rational t = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (!x[i]) return std::nullopt;
            for (unsigned k = 0; k < e[i]; ++k) t *= *x[i];
        }
        acc += t;
    }
    return acc;
}

// candidate values picked when a variable is unconstrained by the equations
const std::vector<Rational>& free_candidates() {
    static const std::vector<Rational> vals = {Rational(1),      Rational(2),  Rational(1, 2),
                                               Rational(4),      Rational(-1), Rational(-2),
                                               Rational(-1, 2),  Rational(0)};
    return vals;
}

struct RawSolution {
    // per-ACTIVE-var values (full-length vectors, inactive entries unused)
    std::vector<double> values;
    std::vector<std::optional<Rational>> exact;
    bool certain = true;
};

struct UniRoot {
    double approx;
    std::optional<Rational> exact;
};

// all real roots shared by a set of univariate polynomials (complete via gcd +
// Sturm); `ok` is false when the gcd degenerates (all zero)
std::vector<UniRoot> solve_univariate(const std::vector<UPoly>& eqs, bool& ok,
                                      bool& any_roots_possible) {
    ok = true;
    any_roots_possible = true;
    UPoly g;
    bool have = false;
    for (const auto& e : eqs) {
        if (e.is_zero()) continue;
        g = have ? upoly_gcd(g, e) : e;
        have = true;
        if (g.degree() == 0) break;
    }
    if (!have) {
        ok = false;  // every polynomial vanished: any value works, caller decides
        return {};
    }
    if (g.degree() == 0) {
        any_roots_possible = false;  // gcd is a nonzero constant: no common root
        return {};
    }
    std::vector<UniRoot> out;
    for (const auto& enc : isolate_real_roots(g, Rational(1, 1) / Rational(1LL << 62))) {
        UniRoot r;
        if (enc.exact) {
            r.exact = *enc.exact;
            r.approx = enc.exact->to_double();
        } else {
            r.approx = ((enc.lo + enc.hi) / Rational(2)).to_double();
        }
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Newton backend

struct CompiledPoly {
    struct Term {
        double coef;
        std::vector<std::pair<std::size_t, unsigned>> pows;  // (var, exponent)
    };
    std::vector<Term> terms;

    static CompiledPoly compile(const Poly& p) {
        CompiledPoly c;
        for (const auto& [e, coef] : p.terms()) {
            Term t;
            t.coef = coef.to_double();
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) t.pows.push_back({i, e[i]});
            c.terms.push_back(std::move(t));
        }
        return c;
    }

    double eval(const std::vector<double>& x) const {
        double acc = 0;
        for (const auto& t : terms) {
            double v = t.coef;
            for (auto [i, e] : t.pows)
                for (unsigned k = 0; k < e; ++k) v *= x[i];
            acc += v;
        }
        return acc;
    }
};

struct NewtonProblem {
    std::vector<CompiledPoly> f;
    std::vector<std::vector<CompiledPoly>> jac;  // jac[eq][unknown]
    std::vector<std::size_t> unknowns;           // var indices
};

bool newton_run(const NewtonProblem& prob, std::vector<double>& x_full,
                const SolverBudget& budget) {
    const std::size_t k = prob.unknowns.size();
    const std::size_t m = prob.f.size();
    double lambda = 1e-3;

    auto residual_sq = [&](const std::vector<double>& xf) {
        double s = 0;
        for (const auto& f : prob.f) {
            double v = f.eval(xf);
            s += v * v;
        }
        return s;
    };

    double rsq = residual_sq(x_full);
    for (std::size_t iter = 0; iter < budget.newton_iters; ++iter) {
        if (!std::isfinite(rsq)) return false;
        double maxres = 0;
        for (const auto& f : prob.f) maxres = std::max(maxres, std::fabs(f.eval(x_full)));
        if (maxres <= budget.newton_residual_tol * 1e-3) break;

        // J and J^T F
        Mat<double> jtj(k, k);
        std::vector<double> jtf(k, 0.0);
        std::vector<double> frow(m), jrow(m * k);
        for (std::size_t e = 0; e < m; ++e) {
            frow[e] = prob.f[e].eval(x_full);
            for (std::size_t u = 0; u < k; ++u) jrow[e * k + u] = prob.jac[e][u].eval(x_full);
        }
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                double s = 0;
                for (std::size_t e = 0; e < m; ++e) s += jrow[e * k + a] * jrow[e * k + b];
                jtj(a, b) = jtj(b, a) = s;
            }
            double s = 0;
            for (std::size_t e = 0; e < m; ++e) s += jrow[e * k + a] * frow[e];
            jtf[a] = s;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 10 && !stepped; ++attempt) {
            Mat<double> lhs = jtj;
            for (std::size_t a = 0; a < k; ++a) lhs(a, a) += lambda * (jtj(a, a) + 1e-12);
            std::vector<double> delta;
            try {
                std::vector<double> rhsneg(k);
                for (std::size_t a = 0; a < k; ++a) rhsneg[a] = -jtf[a];
                delta = solve_square(lhs, rhsneg, 1e-14);
            } catch (const SingularBlockError&) {
                lambda *= 10;
                continue;
            }
            std::vector<double> cand = x_full;
            for (std::size_t u = 0; u < k; ++u) cand[prob.unknowns[u]] += delta[u];
            double crsq = residual_sq(cand);
            if (std::isfinite(crsq) && crsq < rsq) {
                x_full = std::move(cand);
                rsq = crsq;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
            } else {
                lambda *= 4.0;
            }
        }
        if (!stepped) break;
    }
    double maxres = 0;
    for (const auto& f : prob.f) maxres = std::max(maxres, std::fabs(f.eval(x_full)));
    return maxres <= budget.newton_residual_tol;
}

}  // namespace

SolveOutcome solve_system(const PolySystem& sys, const SolverBudget& budget) {
    if (sys.nvars > budget.var_cap)
        throw VariableCapExceeded("solve_system: " + std::to_string(sys.nvars) +
                                  " variables exceed the cap of " +
                                  std::to_string(budget.var_cap));

    SolveOutcome out;
    Prepped prep = preprocess(sys);
    if (prep.infeasible) {
        out.kind = SolveKind::none_found_complete;
        out.report = "linear elimination exposed an inconsistent constant";
        return out;
    }

    // variables the remaining equations actually constrain
    std::vector<std::size_t> used;
    std::vector<std::size_t> free_vars;
    for (std::size_t v = 0; v < sys.nvars; ++v) {
        if (!prep.active[v]) continue;
        bool u = false;
        for (const auto& e : prep.eqs)
            if (e.uses_var(v)) u = true;
        (u ? used : free_vars).push_back(v);
    }

    bool complete = true;
    std::string report;
    std::vector<RawSolution> raw;  // over used vars

    // seeded multi-start damped Gauss-Newton over the used variables; also
    // the representative hunter for positive-dimensional systems
    auto run_newton = [&]() {
        NewtonProblem prob;
        prob.unknowns = used;
        for (const auto& e : prep.eqs) {
            prob.f.push_back(CompiledPoly::compile(e));
            std::vector<CompiledPoly> row;
            for (auto v : used) row.push_back(CompiledPoly::compile(e.derivative(v)));
            prob.jac.push_back(std::move(row));
        }

        static const double grid_vals[] = {0.5, -0.5, 1, -1, 2, -2, 4, -4, 8, -8};
        const std::size_t k = used.size();
        std::vector<std::vector<double>> starts;
        double total = std::pow(10.0, static_cast<double>(k));
        std::mt19937_64 rng(budget.seed);
        if (total <= static_cast<double>(budget.newton_grid_cap)) {
            std::vector<std::size_t> idx(k, 0);
            while (true) {
                std::vector<double> s(k);
                for (std::size_t i = 0; i < k; ++i) s[i] = grid_vals[idx[i]];
                starts.push_back(std::move(s));
                std::size_t c = 0;
                while (c < k && ++idx[c] == 10) idx[c++] = 0;
                if (c == k) break;
            }
        } else {
            std::uniform_int_distribution<int> pick(0, 9);
            for (std::size_t t = 0; t < budget.newton_grid_cap; ++t) {
                std::vector<double> s(k);
                for (std::size_t i = 0; i < k; ++i) s[i] = grid_vals[pick(rng)];
                starts.push_back(std::move(s));
            }
        }
        std::uniform_real_distribution<double> uni(-10.0, 10.0);
        for (std::size_t t = 0; t < budget.newton_random_starts; ++t) {
            std::vector<double> s(k);
            for (auto& v : s) v = uni(rng);
            starts.push_back(std::move(s));
        }

        std::size_t converged = 0;
        for (const auto& s : starts) {
            std::vector<double> xf(sys.nvars, 0.0);
            for (std::size_t i = 0; i < k; ++i) xf[used[i]] = s[i];
            if (!newton_run(prob, xf, budget)) continue;
            ++converged;
            RawSolution r;
            r.values = xf;
            r.exact.assign(sys.nvars, std::nullopt);
            r.certain = false;
            raw.push_back(std::move(r));
        }
        std::ostringstream rep;
        rep << starts.size() << " newton starts, " << converged << " converged";
        return rep.str();
    };

    if (prep.eqs.empty()) {
        RawSolution r;
        r.values.assign(sys.nvars, 0.0);
        r.exact.assign(sys.nvars, std::nullopt);
        raw.push_back(std::move(r));
        // a family; one representative is returned, so the enumeration is not
        // complete unless nothing was free
        if (!free_vars.empty()) {
            complete = false;
            report = "solution family: returned one representative";
        }
    } else if (used.size() == 1 && used.size() <= budget.exact_free_cap) {
        std::vector<UPoly> ueqs;
        for (const auto& e : prep.eqs) ueqs.push_back(to_upoly(e, used[0]));
        bool ok = true, possible = true;
        auto roots = solve_univariate(ueqs, ok, possible);
        if (!ok) {
            complete = false;
            report = "degenerate univariate reduction";
        }
        for (const auto& root : roots) {
            RawSolution r;
            r.values.assign(sys.nvars, 0.0);
            r.exact.assign(sys.nvars, std::nullopt);
            r.values[used[0]] = root.approx;
            r.exact[used[0]] = root.exact;
            raw.push_back(std::move(r));
        }
    } else if (used.size() == 2 && used.size() <= budget.exact_free_cap) {
        const std::size_t xv = used[0], yv = used[1];
        std::vector<UPoly> xonly;
        std::vector<const Poly*> withy;
        for (const auto& e : prep.eqs) {
            if (e.degree_in(yv) == 0)
                xonly.push_back(to_upoly(e, xv));
            else
                withy.push_back(&e);
        }
        // f0: minimal positive y-degree
        const Poly* f0 = withy.front();
        for (const Poly* f : withy)
            if (f->degree_in(yv) < f0->degree_in(yv)) f0 = f;

        std::vector<UPoly> cands = xonly;
        for (const Poly* f : withy) {
            if (f == f0) continue;
            cands.push_back(resultant_wrt(*f0, *f, xv, yv));
        }
        if (cands.empty()) {
            // single equation in (x, y): a curve; positive-dimensional
            complete = false;
            report = "two-unknown system with a single equation: solution curve";
            // representatives: scan x over the candidate grid (all roots kept,
            // downstream sign conditions may reject many), plus newton hunting
            for (const auto& cx : free_candidates()) {
                Poly sub = f0->substitute(xv, Poly::constant(sys.nvars, cx));
                UPoly up = to_upoly(sub, yv);
                if (up.degree() < 1) continue;
                bool ok2 = true, possible2 = true;
                auto yroots = solve_univariate({up}, ok2, possible2);
                for (const auto& yr : yroots) {
                    RawSolution r;
                    r.values.assign(sys.nvars, 0.0);
                    r.exact.assign(sys.nvars, std::nullopt);
                    r.values[xv] = cx.to_double();
                    r.exact[xv] = cx;
                    r.values[yv] = yr.approx;
                    r.exact[yv] = yr.exact;
                    r.certain = false;
                    raw.push_back(std::move(r));
                }
            }
            run_newton();
        } else {
            bool ok = true, possible = true;
            auto xroots = solve_univariate(cands, ok, possible);
            if (!ok) {
                complete = false;
                report = "resultants vanished identically: shared component suspected";
                run_newton();
            }
            for (const auto& xr : xroots) {
                if (xr.exact) {
                    Poly cx = Poly::constant(sys.nvars, *xr.exact);
                    std::vector<UPoly> sub;
                    for (const Poly* f : withy) sub.push_back(to_upoly(f->substitute(xv, cx), yv));
                    bool ok2 = true, possible2 = true;
                    auto yroots = solve_univariate(sub, ok2, possible2);
                    if (!ok2) {
                        complete = false;
                        continue;
                    }
                    for (const auto& yr : yroots) {
                        // verify equations that were x-only are already satisfied
                        RawSolution r;
                        r.values.assign(sys.nvars, 0.0);
                        r.exact.assign(sys.nvars, std::nullopt);
                        r.values[xv] = xr.approx;
                        r.exact[xv] = xr.exact;
                        r.values[yv] = yr.approx;
                        r.exact[yv] = yr.exact;
                        raw.push_back(std::move(r));
                    }
                } else {
                    // irrational x candidate: resolve y numerically from f0 and
                    // verify against the rest with a wide margin
                    Poly cx = Poly::constant(sys.nvars, Rational::from_double(xr.approx));
                    UPoly f0sub = to_upoly(f0->substitute(xv, cx), yv);
                    if (f0sub.degree() < 1) {
                        complete = false;
                        continue;
                    }
                    bool ok2 = true, possible2 = true;
                    auto yroots = solve_univariate({f0sub}, ok2, possible2);
                    bool found_here = false;
                    for (const auto& yr : yroots) {
                        double worst = 0;
                        std::vector<double> point(sys.nvars, 0.0);
                        point[xv] = xr.approx;
                        point[yv] = yr.approx;
                        for (const auto& e : prep.eqs)
                            worst = std::max(worst, std::fabs(e.eval_double(point)));
                        if (worst <= 1e-7) {
                            RawSolution r;
                            r.values.assign(sys.nvars, 0.0);
                            r.exact.assign(sys.nvars, std::nullopt);
                            r.values[xv] = xr.approx;
                            r.values[yv] = yr.approx;
                            r.certain = false;
                            raw.push_back(std::move(r));
                            found_here = true;
                        } else if (worst <= 1e-3) {
                            complete = false;  // cannot confirm nor exclude
                        }
                    }
                    (void)found_here;
                }
            }
        }
    } else {
        // numeric backend
        complete = false;
        report = run_newton();
    }

    // extend each raw solution over the equation-free variables, respecting
    // the sign conditions, then reconstruct the eliminated variables
    std::vector<Assignment> finals;
    bool dropped_for_conditions = false;
    bool dropped_numerically = false;  // a certain candidate was rejected on double arithmetic

    // square-eliminated variables whose sign matters must be branched over;
    // the sign-canonical auxiliaries (inner2's z, y) keep the principal root
    std::vector<std::size_t> branch_positions;  // indices into prep.stack
    for (std::size_t t = 0; t < prep.stack.size(); ++t) {
        if (prep.stack[t].type != Elim::Type::sqrt_principal) continue;
        bool canonical = std::find(sys.sign_canonical_vars.begin(),
                                   sys.sign_canonical_vars.end(),
                                   prep.stack[t].var) != sys.sign_canonical_vars.end();
        if (!canonical) branch_positions.push_back(t);
    }

    auto finish = [&](RawSolution r) {
        // fill free vars: first candidate combination whose conditions hold
        auto try_finish = [&](const std::vector<Rational>& freevals,
                              std::size_t sign_mask) -> std::optional<Assignment> {
            std::vector<double> vals = r.values;
            std::vector<std::optional<Rational>> ex = r.exact;
            for (std::size_t i = 0; i < free_vars.size(); ++i) {
                vals[free_vars[i]] = freevals[i].to_double();
                ex[free_vars[i]] = freevals[i];
            }
            // reconstruct eliminated vars (reverse elimination order)
            for (std::size_t t = prep.stack.size(); t-- > 0;) {
                const Elim& el = prep.stack[t];
                if (el.type == Elim::Type::affine) {
                    vals[el.var] = el.expr.eval_double(vals);
                    ex[el.var] = eval_exact(el.expr, ex);
                } else {
                    int sgn = 1;
                    for (std::size_t b = 0; b < branch_positions.size(); ++b)
                        if (branch_positions[b] == t && (sign_mask >> b) & 1) sgn = -1;
                    double q = el.expr.eval_double(vals);
                    double ratio = el.cval.to_double() / q;
                    vals[el.var] = ratio > 0 ? sgn * std::sqrt(ratio) : std::nan("");
                    ex[el.var] = std::nullopt;
                    auto qe = eval_exact(el.expr, ex);
                    if (qe && !qe->is_zero()) {
                        if (auto root = exact_sqrt(el.cval / *qe)) {
                            if (sgn < 0) root = -*root;
                            ex[el.var] = root;
                            vals[el.var] = root->to_double();
                        }
                    }
                }
            }
            // validate conditions and the original system
            for (const auto& cond : prep.conds) {
                // conditions reference pre-elimination variables; evaluate on
                // the fully reconstructed point
                auto qe = eval_exact(cond.q, ex);
                if (qe) {
                    if (qe->sign() != cond.sign) return std::nullopt;
                } else {
                    double qv = cond.q.eval_double(vals);
                    if (!std::isfinite(qv) || qv * cond.sign <= 0) {
                        if (r.certain) dropped_numerically = true;
                        return std::nullopt;
                    }
                }
            }
            Assignment asg;
            asg.values = std::move(vals);
            asg.exact = std::move(ex);
            double worst = 0;
            bool all_exact_zero = true;
            for (const auto& e : sys.equations) {
                auto ee = eval_exact(e, asg.exact);
                if (ee) {
                    if (!ee->is_zero()) all_exact_zero = false;
                    worst = std::max(worst, std::fabs(ee->to_double()));
                } else {
                    all_exact_zero = false;
                    double v = e.eval_double(asg.values);
                    if (!std::isfinite(v)) return std::nullopt;
                    worst = std::max(worst, std::fabs(v));
                }
            }
            if (asg.fully_exact() && !all_exact_zero) return std::nullopt;
            if (worst > std::max(budget.newton_residual_tol, 1e-9)) return std::nullopt;
            asg.residual = worst;
            return asg;
        };

        const std::size_t masks = std::size_t(1) << branch_positions.size();
        if (free_vars.empty()) {
            bool any = false;
            for (std::size_t mask = 0; mask < masks; ++mask) {
                if (auto a = try_finish({}, mask)) {
                    finals.push_back(std::move(*a));
                    any = true;
                }
            }
            if (!any && r.certain) dropped_for_conditions = true;
            return;
        }
        // lexicographic scan over the candidate grid for free variables;
        // first hit wins per sign branch
        for (std::size_t mask = 0; mask < masks; ++mask) {
            const auto& cand = free_candidates();
            std::vector<std::size_t> idx(free_vars.size(), 0);
            std::size_t tries = 0, cap = 4096;
            bool done = false;
            while (tries++ < cap && !done) {
                std::vector<Rational> fv(free_vars.size());
                for (std::size_t i = 0; i < free_vars.size(); ++i) fv[i] = cand[idx[i]];
                if (auto a = try_finish(fv, mask)) {
                    finals.push_back(std::move(*a));
                    done = true;
                    break;
                }
                std::size_t c = 0;
                while (c < idx.size() && ++idx[c] == cand.size()) idx[c++] = 0;
                if (c == idx.size()) break;
            }
            if (!done) dropped_for_conditions = true;
        }
    };

    for (auto& r : raw) finish(std::move(r));

    if (dropped_for_conditions || dropped_numerically) {
        // a candidate was rejected by the sign conditions or the free-variable
        // search; rejections decided on double arithmetic (or by a bounded
        // grid scan) cannot support a completeness claim
        for (const auto& r : raw)
            if (!r.certain) complete = false;
        if (dropped_numerically) complete = false;
        if (!free_vars.empty()) complete = false;
    }

    // deterministic order + dedupe
    std::sort(finals.begin(), finals.end(), [](const Assignment& a, const Assignment& b) {
        return a.values < b.values;
    });
    std::vector<Assignment> dedup;
    for (auto& a : finals) {
        bool merged = false;
        for (auto& d : dedup) {
            double dist = 0;
            for (std::size_t i = 0; i < a.values.size(); ++i)
                dist = std::max(dist, std::fabs(a.values[i] - d.values[i]));
            if (dist <= budget.merge_tol) {
                merged = true;
                if (a.fully_exact() && !d.fully_exact()) d = a;  // prefer the exact twin
                break;
            }
        }
        if (!merged) dedup.push_back(std::move(a));
    }

    if (!dedup.empty()) {
        out.kind = SolveKind::solutions;
        out.solutions = std::move(dedup);
        out.report = report;
        return out;
    }
    out.kind = complete ? SolveKind::none_found_complete : SolveKind::none_found_incomplete;
    out.report = report.empty() ? (complete ? "exact backend: no real solution" : "no solution found")
                                : report;
    return out;
}

// ---------------------------------------------------------------------------
// algorithm2

SolveOutcome solve_inner2(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                          const Mat<Rational>& lhs, const std::vector<Rational>& rhs,
                          const SolverBudget& budget) {
    return solve_system(assemble_inner2(a, j, lhs, rhs), budget);
}

bool inner2_solution_admissible(const Assignment& sol, const SymMat<Rational>& a,
                                const std::vector<std::size_t>& j, double tol) {
    const std::size_t r = j.size();
    SymMat<double> v(r);
    SymMat<Rational> vx(r);
    bool exact = true;
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = 0; q <= p; ++q) {
            std::size_t idx = svec_index(p, q);
            v.set(p, q, sol.values[idx]);
            if (sol.exact[idx])
                vx.set(p, q, *sol.exact[idx]);
            else
                exact = false;
        }

    if (exact) {
        if (!pd_check(vx, Rational(0))) return false;
        Mat<Rational> vinv = inverse(vx);
        for (std::size_t p = 0; p < r; ++p)
            for (std::size_t q = p + 1; q < r; ++q)
                if (!(vinv(p, q) == a(j[p], j[q]))) return false;
        return true;
    }

    auto eig = jacobi_eigen(v, false);
    double lmax = std::max(std::fabs(eig.values.front()), std::fabs(eig.values.back()));
    if (eig.values.front() <= 1e-9 * std::max(1.0, lmax)) return false;
    Mat<double> vinv;
    try {
        vinv = inverse(v);
    } catch (const SingularBlockError&) {
        return false;
    }
    double scale = 1.0;
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = 0; q < r; ++q) scale = std::max(scale, std::fabs(vinv(p, q)));
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = p + 1; q < r; ++q)
            if (std::fabs(vinv(p, q) - a(j[p], j[q]).to_double()) > tol * scale) return false;
    return true;
}

std::vector<Assignment> admissible_inner2_solutions(const SolveOutcome& outcome,
                                                    const SymMat<Rational>& a,
                                                    const std::vector<std::size_t>& j,
                                                    double tol) {
    std::vector<Assignment> out;
    if (outcome.kind != SolveKind::solutions) return out;
    for (const auto& sol : outcome.solutions)
        if (inner2_solution_admissible(sol, a, j, tol)) out.push_back(sol);
    return out;
}

namespace {

template <class T>
SymMat<Rational> exactify(const SymMat<T>& m) {
    if constexpr (std::is_same_v<T, Rational>) {
        return m;
    } else {
        return to_exact(m);
    }
}

template <class T>
Mat<Rational> exactify(const Mat<T>& m) {
    if constexpr (std::is_same_v<T, Rational>) {
        return m;
    } else {
        Mat<Rational> r(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational::from_double(m(i, j));
        return r;
    }
}

template <class T>
std::vector<Rational> exactify(const std::vector<T>& v) {
    if constexpr (std::is_same_v<T, Rational>) {
        return v;
    } else {
        std::vector<Rational> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rational::from_double(v[i]);
        return r;
    }
}

template <class T>
T from_assignment(double approx, const std::optional<Rational>& exact) {
    if constexpr (std::is_same_v<T, Rational>) {
        return exact ? *exact : Rational::from_double(approx);
    } else {
        return approx;
    }
}

template <class T>
T to_scalar(const Rational& q) {
    if constexpr (std::is_same_v<T, Rational>) {
        return q;
    } else {
        return q.to_double();
    }
}

template <class T>
Alg2Result<T> algorithm2_impl(const SymMat<T>& a, const std::vector<std::size_t>& j,
                              const Mat<T>& lhs, const std::vector<T>& rhs,
                              const SolverBudget& budget, ProblemKind kind,
                              const CharSystem<T>* p1_system,
                              const std::vector<std::size_t>& p1_facets) {
    using st = scalar_traits<T>;
    Alg2Result<T> res;
    const std::size_t r = j.size();
    const std::size_t nv = r * (r + 1) / 2;

    SymMat<Rational> ax = exactify(a);
    Mat<Rational> lx = exactify(lhs);
    std::vector<Rational> rx = exactify(rhs);

    PolySystem sys;
    Mat<Rational> divi_coeffs;
    std::vector<Rational> divi_const;
    if (kind == ProblemKind::P1) {
        if (!p1_system) throw std::invalid_argument("algorithm2: P1 requires the affine family");
        divi_coeffs = exactify(p1_system->divi_coeffs);
        divi_const = exactify(p1_system->divi_const);
        sys = assemble_inner2_p1(ax, j, lx, rx, divi_coeffs, divi_const, p1_facets);
    } else {
        sys = assemble_inner2(ax, j, lx, rx);
    }

    SolveOutcome so = solve_system(sys, budget);
    res.solutions_seen = so.solutions.size();

    if (so.kind == SolveKind::none_found_complete) {
        res.outcome.kind = Alg1Kind::infeasible_for_j;
        res.outcome.certificate = "system (inner2) has no real solution for this J";
        return res;
    }
    if (so.kind == SolveKind::none_found_incomplete) {
        res.outcome.kind = Alg1Kind::rejected_for_j;
        res.outcome.certificate = "search incomplete: " + so.report;
        res.search_incomplete = true;
        return res;
    }

    const double tol = budget.newton_residual_tol;
    for (const Assignment& sol : so.solutions) {
        if (!inner2_solution_admissible(sol, ax, j, 1e-6)) continue;
        SymMat<T> v(r);
        bool exact_v = true;
        for (std::size_t p = 0; p < r; ++p)
            for (std::size_t q = 0; q <= p; ++q) {
                std::size_t idx = svec_index(p, q);
                if (!sol.exact[idx]) exact_v = false;
                v.set(p, q, from_assignment<T>(sol.values[idx], sol.exact[idx]));
            }

        if (kind == ProblemKind::P1) {
            // d on J from y_i^2, d on jbar from the affine family
            std::vector<std::size_t> violated;
            std::vector<T> d(a.n(), T(0));
            for (std::size_t p = 0; p < r; ++p) {
                std::size_t yi = nv + r + p;
                T y = from_assignment<T>(sol.values[yi], sol.exact[yi]);
                d[j[p]] = y * y;
            }
            // normalized diagonal check (the assembled equations carry a det
            // factor, so quasi-solutions must be re-tested directly)
            {
                SymMat<double> vd(r);
                for (std::size_t p = 0; p < r; ++p)
                    for (std::size_t q = 0; q <= p; ++q)
                        vd.set(p, q, sol.values[svec_index(p, q)]);
                Mat<double> vinv;
                try {
                    vinv = inverse(vd);
                } catch (const SingularBlockError&) {
                    continue;
                }
                bool diag_ok = true;
                for (std::size_t p = 0; p < r; ++p) {
                    double want = scalar_traits<Rational>::to_double(ax(j[p], j[p])) -
                                  scalar_traits<T>::to_double(d[j[p]]);
                    double scale = std::max({1.0, std::fabs(vinv(p, p)), std::fabs(want)});
                    if (std::fabs(vinv(p, p) - want) > 1e-6 * scale) diag_ok = false;
                }
                if (!diag_ok) continue;
            }
            auto sv = svec(v);
            for (std::size_t s = 0; s < p1_system->jbar.size(); ++s) {
                T acc(0);
                for (std::size_t c = 0; c < nv; ++c)
                    acc += to_scalar<T>(divi_coeffs(s, c)) * sv[c];
                T di = to_scalar<T>(divi_const[s]) - acc;
                bool neg;
                if constexpr (is_exact_v<T>)
                    neg = exact_v ? (st::sign(di) < 0) : (st::to_double(di) < -tol);
                else
                    neg = st::to_double(di) < -tol;
                if (neg)
                    violated.push_back(s);
                else
                    d[p1_system->jbar[s]] = st::sign(di) < 0 ? T(0) : di;
            }
            if (!violated.empty()) {
                for (auto s : violated)
                    if (std::find(res.violated_facets.begin(), res.violated_facets.end(), s) ==
                        res.violated_facets.end())
                        res.violated_facets.push_back(s);
                continue;
            }
            if (!(is_exact_v<T> && sol.fully_exact())) {
                SymMat<double> mf = to_float(a);
                std::vector<double> df(d.size());
                for (std::size_t i = 0; i < d.size(); ++i)
                    df[i] = scalar_traits<T>::to_double(d[i]);
                mf.sub_diag(df);
                if (numeric_rank(mf, 1e-9).rank > r) continue;
                if (!psd_check(mf, 1e-8 * std::max(1.0, max_abs(mf))).psd) continue;
            }
            res.outcome.kind = Alg1Kind::solved;
            res.outcome.v = v;
            res.outcome.d = d;
            res.exact_witness = is_exact_v<T> && sol.fully_exact();
            return res;
        }

        // P2: d = w
        std::vector<T> d = recover_d(a, j, v);
        if (!(is_exact_v<T> && exact_v && sol.fully_exact())) {
            // numeric candidate: make sure the completion actually reaches
            // rank |J| at float tolerance before accepting it
            SymMat<double> mf = to_float(a);
            std::vector<double> df(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) df[i] = st::to_double(d[i]);
            mf.add_diag(df);
            if (numeric_rank(mf, 1e-9).rank > r) continue;
            if (!psd_check(mf, 1e-8 * std::max(1.0, max_abs(mf))).psd) continue;
        }
        res.outcome.kind = Alg1Kind::solved;
        res.outcome.v = v;
        res.outcome.d = std::move(d);
        res.exact_witness = is_exact_v<T> && exact_v;
        return res;
    }

    // solutions existed but none was admissible
    res.outcome.kind = Alg1Kind::rejected_for_j;
    if (kind == ProblemKind::P1 && !res.violated_facets.empty()) {
        res.outcome.certificate =
            "every solution of (inner2) violates d >= 0 off J; facet recursion applies";
    } else {
        res.outcome.certificate = "solutions found but none admissible at the current tolerance";
        res.search_incomplete = true;
    }
    return res;
}

}  // namespace

Alg2Result<Rational> algorithm2(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                                const Mat<Rational>& lhs, const std::vector<Rational>& rhs,
                                const SolverBudget& budget, ProblemKind kind,
                                const CharSystem<Rational>* p1_system,
                                const std::vector<std::size_t>& p1_facets) {
    return algorithm2_impl(a, j, lhs, rhs, budget, kind, p1_system, p1_facets);
}

Alg2Result<double> algorithm2(const SymMat<double>& a, const std::vector<std::size_t>& j,
                              const Mat<double>& lhs, const std::vector<double>& rhs,
                              const SolverBudget& budget, ProblemKind kind,
                              const CharSystem<double>* p1_system,
                              const std::vector<std::size_t>& p1_facets) {
    return algorithm2_impl(a, j, lhs, rhs, budget, kind, p1_system, p1_facets);
}

}  // namespace lrpd
