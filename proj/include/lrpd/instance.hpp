#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrpd/charsys.hpp"
#include "lrpd/linalg.hpp"

namespace lrpd {

using Pattern = std::vector<std::pair<std::size_t, std::size_t>>;  // i < j pairs

// A tagged problem instance. P1: minimize rank(A - Diag(d)), d >= 0;
// P2: rank(A + Diag(d)); P3: rank(A + L) with L vanishing on the fixed-zero
// pattern. eps > 0 allows a perturbation H with ||H||_F <= eps; the
// sparsity-constrained variants additionally pin H to the nonzeros of A.
template <class T>
struct Instance {
    ProblemKind kind = ProblemKind::P2;
    SymMat<T> a;
    Pattern pattern;  // P3 only: fixed-zero off-diagonal pairs
    std::size_t r = 1;
    double eps = 0.0;
    bool sparsity_constrained = false;

    std::string provenance;  // which compiler produced it, with parameters
    // size of a leading diagonal block (compiled arrow instances); lets
    // verification and probing split the rank via the Schur complement
    std::optional<std::size_t> arrow_block;

    void validate() const {
        const std::size_t n = a.n();
        if (n == 0) throw std::invalid_argument("Instance: empty matrix");
        if (r < 1 || r > n) throw std::invalid_argument("Instance: rank out of range");
        if (eps < 0) throw std::invalid_argument("Instance: negative eps");
        if (kind != ProblemKind::P1) {
            for (std::size_t i = 0; i < n; ++i)
                if (scalar_traits<T>::sign(a(i, i)) != 0)
                    throw std::invalid_argument("Instance: diag(A) must be 0 for P2/P3");
        }
        if (kind == ProblemKind::P3) {
            std::vector<std::vector<bool>> in_x(n, std::vector<bool>(n, false));
            for (auto [i, j] : pattern) {
                if (i >= j || j >= n) throw std::invalid_argument("Instance: bad pattern pair");
                in_x[i][j] = true;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (!in_x[i][j] && scalar_traits<T>::sign(a(i, j)) != 0)
                        throw std::invalid_argument(
                            "Instance: P3 requires A = 0 outside the pattern");
        } else if (!pattern.empty()) {
            throw std::invalid_argument("Instance: pattern is P3-only");
        }
    }

    // off-diagonal pairs NOT fixed to zero (the free positions of a P3 instance)
    Pattern free_pairs() const {
        const std::size_t n = a.n();
        std::vector<std::vector<bool>> in_x(n, std::vector<bool>(n, false));
        for (auto [i, j] : pattern) in_x[i][j] = true;
        Pattern out;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (!in_x[i][j]) out.push_back({i, j});
        return out;
    }
};

// Solution witness. For P1/P2 the diagonal d; for P3 the symmetric fill L
// (diagonal included). u, when present, is an n x r factor certifying the
// rank; it is required by the verifier whenever eps > 0.
template <class T>
struct Decomposition {
    std::vector<T> d;
    std::optional<SymMat<T>> l;
    std::optional<Mat<T>> u;
    std::size_t achieved_rank = 0;
    double residual = 0.0;  // ||H||_F when eps > 0
    bool exact = is_exact_v<T>;
};

struct VerifyReport {
    bool pass = false;
    bool psd = false;
    std::size_t rank = 0;
    double hnorm = 0.0;
    std::vector<std::string> failures;

    void fail(std::string msg) {
        pass = false;
        failures.push_back(std::move(msg));
    }
};

template <class T>
Instance<double> instance_to_float(const Instance<T>& inst) {
    Instance<double> out;
    out.kind = inst.kind;
    out.a = to_float(inst.a);
    out.pattern = inst.pattern;
    out.r = inst.r;
    out.eps = inst.eps;
    out.sparsity_constrained = inst.sparsity_constrained;
    out.provenance = inst.provenance;
    out.arrow_block = inst.arrow_block;
    return out;
}

template <class T>
Decomposition<double> decomposition_to_float(const Decomposition<T>& dec) {
    Decomposition<double> out;
    out.d.resize(dec.d.size());
    for (std::size_t i = 0; i < dec.d.size(); ++i)
        out.d[i] = scalar_traits<T>::to_double(dec.d[i]);
    if (dec.l) out.l = to_float(*dec.l);
    if (dec.u) out.u = to_float(*dec.u);
    out.achieved_rank = dec.achieved_rank;
    out.residual = dec.residual;
    out.exact = false;
    return out;
}

// Completed matrix before perturbation: A - Diag(d) (P1), A + Diag(d) (P2),
// A + L (P3).
template <class T>
SymMat<T> completed_matrix(const Instance<T>& inst, const Decomposition<T>& dec) {
    SymMat<T> m = inst.a;
    switch (inst.kind) {
        case ProblemKind::P1:
            if (dec.d.size() != m.n()) throw std::invalid_argument("verify: d size mismatch");
            m.sub_diag(dec.d);
            break;
        case ProblemKind::P2:
            if (dec.d.size() != m.n()) throw std::invalid_argument("verify: d size mismatch");
            m.add_diag(dec.d);
            break;
        case ProblemKind::P3: {
            if (!dec.l) throw std::invalid_argument("verify: P3 needs L");
            if (dec.l->n() != m.n()) throw std::invalid_argument("verify: L size mismatch");
            m = m + *dec.l;
            break;
        }
    }
    return m;
}

template <class T>
VerifyReport verify(const Instance<T>& inst, const Decomposition<T>& dec, double tol = 1e-9);

// Structured verification for arrow instances (leading diagonal block):
// rank(M) = m + rank(Schur complement) once the block is positive diagonal.
template <class T>
std::optional<VerifyReport> verify_arrow(const Instance<T>& inst, const Decomposition<T>& dec,
                                         double tol);

// ---------------------------------------------------------------------------
// implementation

namespace detail {

template <class T>
bool near_zero(const T& v, double tol) {
    if constexpr (is_exact_v<T>)
        return v.is_zero();
    else
        return std::fabs(v) <= tol;
}

}  // namespace detail

template <class T>
std::optional<VerifyReport> verify_arrow(const Instance<T>& inst, const Decomposition<T>& dec,
                                         double tol) {
    if (!inst.arrow_block || inst.eps > 0) return std::nullopt;
    const std::size_t m = *inst.arrow_block;
    const std::size_t n = inst.a.n();
    if (m == 0 || m >= n) return std::nullopt;

    SymMat<T> full = completed_matrix(inst, dec);
    // the leading block must be diagonal with positive entries
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (scalar_traits<T>::sign(full(i, j)) != 0) return std::nullopt;

    VerifyReport rep;
    rep.pass = true;
    for (std::size_t i = 0; i < m; ++i) {
        double di = scalar_traits<T>::to_double(full(i, i));
        if (di > tol) continue;
        // a PSD matrix satisfies |M_ij| <= sqrt(M_ii M_jj); a nonpositive
        // diagonal entry against a solid row certifies non-PSD without the
        // dense eigensolve
        double rowmax = 0.0, diagmax = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) rowmax = std::max(rowmax, std::fabs(scalar_traits<T>::to_double(full(i, j))));
            diagmax = std::max(diagmax, scalar_traits<T>::to_double(full(j, j)));
        }
        if (di < -tol || rowmax * rowmax > std::max(di, 0.0) * std::max(diagmax, 0.0) + tol) {
            rep.psd = false;
            rep.rank = 0;  // not computed on this branch
            rep.fail("leading diagonal block not positive");
            return rep;
        }
        return std::nullopt;  // ambiguous: dense path decides
    }

    // S = A22 - W D^{-1} W^T, exploiting the diagonal block directly
    const std::size_t rest = n - m;
    SymMat<T> s(rest);
    for (std::size_t i = 0; i < rest; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            T acc = full(m + i, m + j);
            for (std::size_t e = 0; e < m; ++e) {
                const T& wi = full(m + i, e);
                const T& wj = full(m + j, e);
                if (scalar_traits<T>::sign(wi) == 0 || scalar_traits<T>::sign(wj) == 0) continue;
                acc -= wi * wj / full(e, e);
            }
            s.set(i, j, acc);
        }

    if constexpr (is_exact_v<T>) {
        rep.rank = m + exact_rank(s.dense());
        rep.psd = psd_check(s, T(0)).psd;
    } else {
        // threshold against the scale of the full matrix, matching what the
        // dense route would use; the Schur complement itself may live on a
        // much smaller scale
        double scale = std::max(1.0, max_abs(full));
        rep.rank = m + numeric_rank_abs(s, tol * scale).rank;
        rep.psd = psd_check(s, std::max(tol, tol * scale)).psd;
    }
    if (!rep.psd) rep.fail("schur complement not PSD");
    if (rep.rank > inst.r) rep.fail("rank exceeds target");
    return rep;
}

template <class T>
VerifyReport verify(const Instance<T>& inst, const Decomposition<T>& dec, double tol) {
    VerifyReport rep;
    rep.pass = true;
    const std::size_t n = inst.a.n();

    if (inst.kind == ProblemKind::P1) {
        for (std::size_t i = 0; i < dec.d.size(); ++i) {
            bool ok = is_exact_v<T> ? scalar_traits<T>::sign(dec.d[i]) >= 0
                                    : scalar_traits<T>::to_double(dec.d[i]) >= -tol;
            if (!ok) rep.fail("d_" + std::to_string(i + 1) + " negative");
        }
    }
    if (inst.kind == ProblemKind::P3 && dec.l) {
        for (auto [i, j] : inst.pattern)
            if (!detail::near_zero((*dec.l)(i, j), tol))
                rep.fail("L does not fit the pattern at (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ")");
    }

    if (inst.eps == 0) {
        const bool exact_route = dec.exact && is_exact_v<T>;
        if (exact_route) {
            if (auto arrow = verify_arrow(inst, dec, tol)) {
                for (auto& f : rep.failures) arrow->fail(f);
                return *arrow;
            }
        } else if constexpr (!std::is_same_v<T, double>) {
            // numeric witness on an exact instance: verify in float
            auto frep = verify(instance_to_float(inst), decomposition_to_float(dec), tol);
            for (auto& f : rep.failures) frep.fail(f);
            return frep;
        } else {
            if (auto arrow = verify_arrow(inst, dec, tol)) {
                for (auto& f : rep.failures) arrow->fail(f);
                return *arrow;
            }
        }
        SymMat<T> m = completed_matrix(inst, dec);
        if constexpr (is_exact_v<T>) {
            rep.psd = psd_check(m, T(0)).psd;
            rep.rank = numeric_rank(m).rank;
        } else {
            rep.psd = psd_check(m, std::max(tol, 1e-12)).psd;
            rep.rank = numeric_rank(m, std::max(tol, 1e-12)).rank;
        }
        if (!rep.psd) rep.fail("completed matrix not PSD");
        if (rep.rank > inst.r) rep.fail("rank exceeds target");
        return rep;
    }

    // perturbed variants need the factor
    if (!dec.u) {
        rep.fail("perturbed instance requires the factor U");
        return rep;
    }
    if (dec.u->rows() != n || dec.u->cols() > inst.r) {
        rep.fail("factor U has a wrong shape");
        return rep;
    }
    SymMat<T> m = completed_matrix(inst, dec);
    Mat<T> uu = *dec.u * dec.u->transposed();
    SymMat<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            h.set(i, j, scalar_traits<T>::to_double(uu(i, j)) -
                            scalar_traits<T>::to_double(m(i, j)));
    rep.hnorm = fro_norm(h);
    rep.psd = true;  // U U^T is a Gram matrix
    rep.rank = dec.u->cols();
    if (rep.hnorm > inst.eps * (1 + 1e-9) + tol) rep.fail("||H||_F exceeds the budget");
    if (inst.sparsity_constrained) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (scalar_traits<T>::sign(inst.a(i, j)) == 0 && std::fabs(h(i, j)) > tol)
                    rep.fail("H touches a structural zero of A");
    }
    return rep;
}

}  // namespace lrpd
