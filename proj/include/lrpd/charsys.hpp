#pragma once

#include <string>
#include <vector>

#include "lrpd/linalg.hpp"

namespace lrpd {

enum class ProblemKind { P1, P2, P3 };

inline const char* kind_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::P1: return "P1";
        case ProblemKind::P2: return "P2";
        case ProblemKind::P3: return "P3";
    }
    return "?";
}

// The linear slice of the characterization system for a given index set J:
// one row [A(J,i) (x)_s A(J,j)]^T svec(V) = A_ij per pair i < j outside J,
// reduced to an independent basis. For P1 the affine functions
// d_i(V) = A_ii - [A(J,i) (x)_s A(J,i)]^T svec(V), i outside J, ride along.
template <class T>
struct CharSystem {
    ProblemKind kind = ProblemKind::P2;
    std::vector<std::size_t> j;     // sorted
    std::vector<std::size_t> jbar;  // sorted complement
    std::size_t r = 0;
    LinStatus status = LinStatus::underdetermined;
    Mat<T> lhs;          // reduced basis, full row rank
    std::vector<T> rhs;
    std::vector<T> unique_svec;  // when status == unique

    Mat<T> divi_coeffs;        // |jbar| x r(r+1)/2 (P1 only)
    std::vector<T> divi_const; // A_ii per jbar entry (P1 only)
};

enum class Alg1Kind { solved, infeasible_for_j, underdetermined, rejected_for_j };

template <class T>
struct Alg1Outcome {
    Alg1Kind kind = Alg1Kind::rejected_for_j;
    std::vector<T> d;  // kind == solved (problem-facing d, per ProblemKind)
    SymMat<T> v;       // kind == solved
    std::string certificate;
    Mat<T> lhs;          // kind == underdetermined
    std::vector<T> rhs;  // kind == underdetermined

    bool solved() const { return kind == Alg1Kind::solved; }
};

namespace detail {

// row of [a (x)_s b]^T over svec coordinates (lower triangle, row-major)
template <class T>
std::vector<T> svec_row(const std::vector<T>& a, const std::vector<T>& b) {
    const std::size_t r = a.size();
    std::vector<T> row(r * (r + 1) / 2, T(0));
    for (std::size_t p = 0; p < r; ++p)
        for (std::size_t q = 0; q <= p; ++q)
            row[svec_index(p, q)] = (p == q) ? a[p] * b[p] : a[p] * b[q] + a[q] * b[p];
    return row;
}

template <class T>
std::vector<T> column_of(const SymMat<T>& a, const std::vector<std::size_t>& j, std::size_t i) {
    std::vector<T> col(j.size());
    for (std::size_t t = 0; t < j.size(); ++t) col[t] = a(j[t], i);
    return col;
}

}  // namespace detail

template <class T>
CharSystem<T> assemble_linear_system(const SymMat<T>& a, std::vector<std::size_t> j,
                                     ProblemKind kind, double tol = 1e-10) {
    const std::size_t n = a.n();
    std::sort(j.begin(), j.end());
    if (j.empty() || j.size() >= n)
        throw std::invalid_argument("assemble_linear_system: need 1 <= |J| <= n-1");
    for (std::size_t t = 0; t + 1 < j.size(); ++t)
        if (j[t] == j[t + 1]) throw std::invalid_argument("assemble_linear_system: duplicate index");
    if (j.back() >= n) throw std::invalid_argument("assemble_linear_system: index out of range");
    if (kind != ProblemKind::P1) {
        for (std::size_t i = 0; i < n; ++i)
            if (scalar_traits<T>::sign(a(i, i)) != 0)
                throw std::invalid_argument("assemble_linear_system: diag(A) must be 0 for P2/P3");
    }

    CharSystem<T> cs;
    cs.kind = kind;
    cs.j = j;
    cs.r = j.size();
    std::vector<bool> in_j(n, false);
    for (auto t : j) in_j[t] = true;
    for (std::size_t i = 0; i < n; ++i)
        if (!in_j[i]) cs.jbar.push_back(i);

    const std::size_t vars = cs.r * (cs.r + 1) / 2;
    Mat<T> rows(cs.jbar.size() * (cs.jbar.size() - 1) / 2, vars);
    std::vector<T> rhs;
    rhs.reserve(rows.rows());
    std::size_t ridx = 0;
    for (std::size_t s = 0; s < cs.jbar.size(); ++s)
        for (std::size_t t = s + 1; t < cs.jbar.size(); ++t) {
            auto row = detail::svec_row(detail::column_of(a, j, cs.jbar[s]),
                                        detail::column_of(a, j, cs.jbar[t]));
            for (std::size_t c = 0; c < vars; ++c) rows(ridx, c) = row[c];
            rhs.push_back(a(cs.jbar[s], cs.jbar[t]));
            ++ridx;
        }

    auto red = reduce_linear(rows, rhs, tol);
    cs.status = red.status;
    cs.lhs = std::move(red.basis_lhs);
    cs.rhs = std::move(red.basis_rhs);
    if (red.status == LinStatus::unique) cs.unique_svec = std::move(red.solution);

    if (kind == ProblemKind::P1) {
        cs.divi_coeffs = Mat<T>(cs.jbar.size(), vars);
        cs.divi_const.resize(cs.jbar.size());
        for (std::size_t s = 0; s < cs.jbar.size(); ++s) {
            auto col = detail::column_of(a, j, cs.jbar[s]);
            auto row = detail::svec_row(col, col);
            for (std::size_t c = 0; c < vars; ++c) cs.divi_coeffs(s, c) = row[c];
            cs.divi_const[s] = a(cs.jbar[s], cs.jbar[s]);
        }
    }
    return cs;
}

// Completion diagonal w: w_i = (V^{-1})_ii on J, w_i = A(J,i)^T V A(J,i) off J.
template <class T>
std::vector<T> recover_d(const SymMat<T>& a, const std::vector<std::size_t>& j,
                         const SymMat<T>& v) {
    const std::size_t n = a.n();
    std::vector<bool> in_j(n, false);
    std::vector<std::size_t> pos(n, 0);
    for (std::size_t t = 0; t < j.size(); ++t) {
        in_j[j[t]] = true;
        pos[j[t]] = t;
    }
    Mat<T> vinv = inverse(v);
    std::vector<T> w(n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (in_j[i]) {
            w[i] = vinv(pos[i], pos[i]);
        } else {
            auto col = detail::column_of(a, j, i);
            T acc(0);
            for (std::size_t p = 0; p < j.size(); ++p)
                for (std::size_t q = 0; q < j.size(); ++q) acc += col[p] * v(p, q) * col[q];
            w[i] = acc;
        }
    }
    return w;
}

// Strict positive definiteness: diagonally pivoted elimination, every pivot
// must clear +tol.
template <class T>
bool pd_check(const SymMat<T>& m, const T& tol) {
    const std::size_t n = m.n();
    Mat<T> w = m.dense();
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t p = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && (p == n || w(i, i) > w(p, p))) p = i;
        if (!(w(p, p) > tol)) return false;
        const T piv = w(p, p);
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || i == p) continue;
            T f = w(i, p) / piv;
            for (std::size_t k = 0; k < n; ++k) {
                if (done[k] || k == p) continue;
                w(i, k) -= f * w(p, k);
            }
        }
        done[p] = true;
    }
    return true;
}

// Algorithm: linear solver with a given index set. Follows the paper branch
// structure; the "unique V" branch rejects with a complete certificate, the
// underdetermined branch hands the reduced basis to the nonlinear phase.
template <class T>
Alg1Outcome<T> algorithm1(const SymMat<T>& a, const std::vector<std::size_t>& j_in,
                          ProblemKind kind, double tol = 1e-8) {
    using st = scalar_traits<T>;
    Alg1Outcome<T> out;
    CharSystem<T> cs = assemble_linear_system(a, j_in, kind, is_exact_v<T> ? 0.0 : 1e-10);

    if (cs.status == LinStatus::inconsistent) {
        out.kind = Alg1Kind::infeasible_for_j;
        out.certificate =
            "system (inner) has no solution for this J: either the problem has no solution at "
            "this objective value, or U(J,:) is singular in every solution";
        return out;
    }
    if (cs.status == LinStatus::underdetermined) {
        out.kind = Alg1Kind::underdetermined;
        out.lhs = cs.lhs;
        out.rhs = cs.rhs;
        return out;
    }

    // unique V
    SymMat<T> v = smat(cs.unique_svec);
    T pd_tol(0);
    if constexpr (!is_exact_v<T>) pd_tol = tol;
    if (!pd_check(v, pd_tol)) {
        out.kind = Alg1Kind::infeasible_for_j;
        out.certificate = "unique V is not positive definite: no solution with nonsingular U(J,:)";
        return out;
    }

    Mat<T> vinv = inverse(v);
    for (std::size_t p = 0; p < cs.r; ++p)
        for (std::size_t q = p + 1; q < cs.r; ++q) {
            T lhs = vinv(p, q);
            T want = a(cs.j[p], cs.j[q]);
            bool ok;
            if constexpr (is_exact_v<T>) {
                ok = (lhs == want);
            } else {
                double scale = std::max({1.0, std::fabs(st::to_double(lhs)),
                                         std::fabs(st::to_double(want))});
                ok = std::fabs(st::to_double(lhs) - st::to_double(want)) <= tol * scale;
            }
            if (!ok) {
                out.kind = Alg1Kind::infeasible_for_j;
                out.certificate =
                    "unique V contradicts e_i^T V^{-1} e_j = A_ij on J: no solution with "
                    "nonsingular U(J,:)";
                return out;
            }
        }

    std::vector<T> w = recover_d(a, cs.j, v);

    if (kind == ProblemKind::P1) {
        // d_i = A_ii - w_i must be nonnegative everywhere
        for (std::size_t i = 0; i < a.n(); ++i) {
            T d = a(i, i) - w[i];
            bool ok = is_exact_v<T> ? (st::sign(d) >= 0) : (st::to_double(d) >= -tol);
            if (!ok) {
                out.kind = Alg1Kind::infeasible_for_j;
                out.certificate = "unique V forces a negative d_" + std::to_string(i + 1) +
                                  ": no nonnegative solution with nonsingular U(J,:)";
                return out;
            }
        }
        out.d.resize(a.n());
        for (std::size_t i = 0; i < a.n(); ++i) out.d[i] = a(i, i) - w[i];
    } else {
        out.d = w;
    }
    out.kind = Alg1Kind::solved;
    out.v = v;
    return out;
}

}  // namespace lrpd
