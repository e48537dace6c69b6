#pragma once

#include <atomic>
#include <optional>
#include <sstream>
#include <thread>

#include "lrpd/instance.hpp"
#include "lrpd/polysolve.hpp"
#include "lrpd/reductions.hpp"

namespace lrpd {

enum class SolveStatus { feasible, infeasible, unknown };

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unknown: return "unknown";
    }
    return "?";
}

template <class T>
struct SolveResult {
    SolveStatus status = SolveStatus::unknown;
    std::optional<Decomposition<T>> dec;
    std::optional<std::vector<std::size_t>> witness_j;
    std::string report;
    std::size_t subsets_processed = 0;
    std::size_t subsets_incomplete = 0;
};

struct DriveBudget {
    SolverBudget poly;
    std::size_t threads = 1;
    std::size_t p3_m_cap = 6;  // compiled route refuses larger pattern complements
    double verify_tol = 1e-9;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(r);
    std::iota(cur.begin(), cur.end(), 0);
    if (r > n) return out;
    while (true) {
        out.push_back(cur);
        std::size_t i = r;
        while (i-- > 0) {
            if (cur[i] + (r - i) < n) {
                ++cur[i];
                for (std::size_t k = i + 1; k < r; ++k) cur[k] = cur[k - 1] + 1;
                break;
            }
            if (i == 0) return out;
        }
    }
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& f) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    std::size_t spawn = std::min(threads, count);
    pool.reserve(spawn);
    for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

enum class JVerdict { solved, infeasible, incomplete };

template <class T>
struct JOutcome {
    JVerdict verdict = JVerdict::incomplete;
    std::vector<T> d;
    bool exact = false;
    std::string note;
};

template <class T>
JOutcome<T> run_one_j_p2(const SymMat<T>& a, const std::vector<std::size_t>& j,
                         const SolverBudget& budget) {
    JOutcome<T> out;
    auto o1 = algorithm1(a, j, ProblemKind::P2);
    if (o1.kind == Alg1Kind::solved) {
        out.verdict = JVerdict::solved;
        out.d = o1.d;
        out.exact = is_exact_v<T>;
        return out;
    }
    if (o1.kind == Alg1Kind::infeasible_for_j) {
        out.verdict = JVerdict::infeasible;
        out.note = o1.certificate;
        return out;
    }
    try {
        auto res = algorithm2(a, j, o1.lhs, o1.rhs, budget, ProblemKind::P2);
        if (res.outcome.kind == Alg1Kind::solved) {
            out.verdict = JVerdict::solved;
            out.d = res.outcome.d;
            out.exact = res.exact_witness;
            return out;
        }
        if (res.outcome.kind == Alg1Kind::infeasible_for_j) {
            out.verdict = JVerdict::infeasible;
            out.note = res.outcome.certificate;
            return out;
        }
        out.verdict = JVerdict::incomplete;
        out.note = res.outcome.certificate;
    } catch (const VariableCapExceeded& e) {
        out.verdict = JVerdict::incomplete;
        out.note = e.what();
    }
    return out;
}

// P1: linear phase, then the nonlinear phase with nonnegativity facet
// recursion. Appended facets must stay linearly independent; the subset size
// is capped by the dimension of the linear family.
template <class T>
JOutcome<T> run_one_j_p1(const SymMat<T>& a, const std::vector<std::size_t>& j,
                         const SolverBudget& budget) {
    JOutcome<T> out;
    auto o1 = algorithm1(a, j, ProblemKind::P1);
    if (o1.kind == Alg1Kind::solved) {
        out.verdict = JVerdict::solved;
        out.d = o1.d;
        out.exact = is_exact_v<T>;
        return out;
    }
    if (o1.kind == Alg1Kind::infeasible_for_j) {
        out.verdict = JVerdict::infeasible;
        out.note = o1.certificate;
        return out;
    }

    CharSystem<T> cs = assemble_linear_system(a, j, ProblemKind::P1);
    const std::size_t vars = j.size() * (j.size() + 1) / 2;
    const std::size_t depth_cap = vars;  // independent linear equations bound

    auto appended_rank = [&](const std::vector<std::size_t>& facets) {
        Mat<T> rows(o1.lhs.rows() + facets.size(), vars);
        for (std::size_t i = 0; i < o1.lhs.rows(); ++i)
            for (std::size_t c = 0; c < vars; ++c) rows(i, c) = o1.lhs(i, c);
        for (std::size_t f = 0; f < facets.size(); ++f)
            for (std::size_t c = 0; c < vars; ++c)
                rows(o1.lhs.rows() + f, c) = cs.divi_coeffs(facets[f], c);
        if constexpr (is_exact_v<T>) {
            return exact_rank(rows);
        } else {
            std::vector<double> zero(rows.rows(), 0.0);
            return reduce_linear(rows, zero, 1e-10).rank;
        }
    };

    bool any_incomplete = false;
    std::vector<std::vector<std::size_t>> frontier{{}};
    std::vector<std::vector<std::size_t>> seen;
    std::size_t base_rank = appended_rank({});

    while (!frontier.empty()) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& facets : frontier) {
            try {
                auto res =
                    algorithm2(a, j, o1.lhs, o1.rhs, budget, ProblemKind::P1, &cs, facets);
                if (res.outcome.kind == Alg1Kind::solved) {
                    out.verdict = JVerdict::solved;
                    out.d = res.outcome.d;
                    out.exact = res.exact_witness;
                    return out;
                }
                if (res.search_incomplete) any_incomplete = true;
                for (auto v : res.violated_facets) {
                    if (std::find(facets.begin(), facets.end(), v) != facets.end()) continue;
                    auto child = facets;
                    child.push_back(v);
                    std::sort(child.begin(), child.end());
                    if (child.size() > depth_cap) continue;
                    if (std::find(seen.begin(), seen.end(), child) != seen.end()) continue;
                    // never append a linearly dependent facet
                    if (appended_rank(child) <= appended_rank(facets)) continue;
                    seen.push_back(child);
                    next.push_back(child);
                }
            } catch (const VariableCapExceeded& e) {
                any_incomplete = true;
                out.note = e.what();
            }
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    (void)base_rank;

    out.verdict = any_incomplete ? JVerdict::incomplete : JVerdict::infeasible;
    if (out.note.empty())
        out.note = any_incomplete ? "facet recursion exhausted with incomplete branches"
                                  : "all facet branches closed with complete certificates";
    return out;
}

}  // namespace detail

template <class T>
SolveResult<T> solve_rank_given(const Instance<T>& inst, const DriveBudget& budget) {
    inst.validate();
    const SymMat<T>& a = inst.a;
    const std::size_t n = a.n();
    SolveResult<T> result;

    if (inst.r >= n) {
        // rank n asks for nothing beyond PSD; settle it directly
        Decomposition<T> dec;
        dec.d.assign(n, T(0));
        if (inst.kind == ProblemKind::P2 || inst.kind == ProblemKind::P3) {
            auto eig = jacobi_eigen(to_float(a), false);
            double shift = std::max(0.0, -eig.values.front());
            T lift = scalar_traits<T>::from_ratio(
                static_cast<long>(std::ceil(shift * 1048576.0)) + 1, 1048576);
            if (inst.kind == ProblemKind::P2) {
                for (auto& v : dec.d) v = lift;
            } else {
                SymMat<T> l(n);
                for (std::size_t i = 0; i < n; ++i) l.set(i, i, lift);
                dec.l = l;
                dec.d.clear();
            }
            dec.exact = false;
        }
        // P1 keeps d = 0 (instances come with A PSD)
        auto rep = verify(inst, dec, budget.verify_tol);
        dec.achieved_rank = rep.rank;
        result.status = rep.pass ? SolveStatus::feasible : SolveStatus::unknown;
        result.dec = std::move(dec);
        if (result.status != SolveStatus::feasible)
            result.report = "rank-n shortcut failed verification";
        return result;
    }

    auto js = detail::all_subsets(n, inst.r);
    std::vector<detail::JOutcome<T>> outcomes(js.size());

    const std::size_t chunk = std::max<std::size_t>(budget.threads * 8, 8);
    std::size_t processed = 0;
    std::optional<std::size_t> winner;
    std::optional<Decomposition<T>> winner_dec;
    for (std::size_t begin = 0; begin < js.size() && !winner; begin += chunk) {
        std::size_t end = std::min(js.size(), begin + chunk);
        detail::parallel_for(end - begin, budget.threads, [&](std::size_t k) {
            std::size_t idx = begin + k;
            outcomes[idx] = inst.kind == ProblemKind::P1
                                ? detail::run_one_j_p1(a, js[idx], budget.poly)
                                : detail::run_one_j_p2(a, js[idx], budget.poly);
        });
        processed = end;
        for (std::size_t idx = begin; idx < end; ++idx) {
            if (outcomes[idx].verdict != detail::JVerdict::solved) continue;
            Decomposition<T> dec;
            dec.d = outcomes[idx].d;
            dec.exact = outcomes[idx].exact;
            auto rep = verify(inst, dec, budget.verify_tol);
            if (!rep.pass) {
                if (outcomes[idx].exact)
                    throw std::logic_error("solve: exact witness failed verification");
                // numeric witness too sloppy: demote this J and keep looking
                outcomes[idx].verdict = detail::JVerdict::incomplete;
                outcomes[idx].note = "numeric witness failed verification";
                continue;
            }
            dec.achieved_rank = rep.rank;
            winner = idx;
            winner_dec = std::move(dec);
            break;
        }
    }
    result.subsets_processed = processed;

    if (winner) {
        result.status = SolveStatus::feasible;
        result.dec = std::move(winner_dec);
        result.witness_j = js[*winner];
        return result;
    }

    std::size_t incomplete = 0;
    for (const auto& o : outcomes)
        if (o.verdict == detail::JVerdict::incomplete) ++incomplete;
    result.subsets_incomplete = incomplete;
    if (incomplete == 0) {
        result.status = SolveStatus::infeasible;
        result.report = "every index set terminated with a complete certificate";
    } else {
        result.status = SolveStatus::unknown;
        std::ostringstream os;
        os << incomplete << " of " << js.size() << " index sets ended with incomplete searches";
        result.report = os.str();
    }
    return result;
}

template <class T>
SolveResult<T> solve_p2(const Instance<T>& inst, const DriveBudget& budget) {
    if (inst.kind != ProblemKind::P2) throw std::invalid_argument("solve_p2: wrong kind");
    return solve_rank_given(inst, budget);
}

template <class T>
SolveResult<T> solve_p1(const Instance<T>& inst, const DriveBudget& budget) {
    if (inst.kind != ProblemKind::P1) throw std::invalid_argument("solve_p1: wrong kind");
    return solve_rank_given(inst, budget);
}

// (P3) via the compiled (P2) instance of size 2m + n at rank 2m + r; any
// feasible diagonal maps back through the Schur structure. The compiled rank
// blows up with m, so the route refuses large pattern complements.
template <class T>
SolveResult<T> solve_p3(const Instance<T>& inst, const DriveBudget& budget) {
    if (inst.kind != ProblemKind::P3) throw std::invalid_argument("solve_p3: wrong kind");
    inst.validate();
    const std::size_t m = inst.free_pairs().size();
    if (m > budget.p3_m_cap)
        throw std::invalid_argument("solve_p3: pattern complement of size " + std::to_string(m) +
                                    " exceeds the compiled-route cap " +
                                    std::to_string(budget.p3_m_cap));
    if (inst.r >= inst.a.n()) return solve_rank_given(inst, budget);

    auto red = reduce_p3_to_p2(inst);
    auto p2res = solve_rank_given(red.p2, budget);

    SolveResult<T> out;
    out.subsets_processed = p2res.subsets_processed;
    out.subsets_incomplete = p2res.subsets_incomplete;
    out.report = p2res.report;
    out.status = p2res.status;
    if (p2res.status != SolveStatus::feasible) return out;

    Decomposition<T> dec;
    dec.l = red.backward(p2res.dec->d);
    dec.exact = p2res.dec->exact;
    auto rep = verify(inst, dec, budget.verify_tol);
    if (!rep.pass) {
        out.status = SolveStatus::unknown;
        out.report = "back-mapped witness failed verification";
        return out;
    }
    dec.achieved_rank = rep.rank;
    out.dec = std::move(dec);
    out.witness_j = p2res.witness_j;
    return out;
}

template <class T>
SolveResult<T> solve_instance(const Instance<T>& inst, const DriveBudget& budget) {
    switch (inst.kind) {
        case ProblemKind::P1: return solve_p1(inst, budget);
        case ProblemKind::P2: return solve_p2(inst, budget);
        case ProblemKind::P3: return solve_p3(inst, budget);
    }
    throw std::logic_error("solve_instance: bad kind");
}

template <class T>
struct MinRankResult {
    std::size_t min_rank = 0;
    SolveResult<T> result;
    std::vector<SolveStatus> per_rank;  // verdict at each r = 1..min_rank
};

// ascending rank loop; falls back to d = -lambda_min(A) 1 at r = n-1
template <class T>
MinRankResult<T> solve_p2_min(const SymMat<T>& a, const DriveBudget& budget) {
    MinRankResult<T> out;
    const std::size_t n = a.n();
    for (std::size_t r = 1; r + 1 <= n; ++r) {
        Instance<T> inst;
        inst.kind = ProblemKind::P2;
        inst.a = a;
        inst.r = r;
        auto res = solve_rank_given(inst, budget);
        out.per_rank.push_back(res.status);
        if (res.status == SolveStatus::feasible) {
            out.min_rank = r;
            out.result = std::move(res);
            return out;
        }
    }
    // fallback: d = -lambda_min(A) * 1 gives objective at most n-1
    Instance<T> inst;
    inst.kind = ProblemKind::P2;
    inst.a = a;
    inst.r = n == 1 ? 1 : n - 1;
    auto eig = jacobi_eigen(to_float(a), false);
    double shift = std::max(0.0, -eig.values.front());
    Decomposition<T> dec;
    T dval(0);
    if constexpr (is_exact_v<T>)
        dval = Rational::from_double(shift);
    else
        dval = shift;
    dec.d.assign(n, dval);
    dec.exact = false;
    auto rep = verify(inst, dec, budget.verify_tol);
    out.min_rank = inst.r;
    out.result.status = rep.pass ? SolveStatus::feasible : SolveStatus::unknown;
    dec.achieved_rank = rep.rank;
    out.result.dec = std::move(dec);
    out.result.report = "fallback diagonal shift at rank n-1";
    out.per_rank.push_back(out.result.status);
    return out;
}

}  // namespace lrpd
