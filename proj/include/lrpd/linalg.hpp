#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lrpd/kernels.hpp"
#include "lrpd/matrix.hpp"

namespace lrpd {

struct SingularBlockError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Rank

struct RankReport {
    std::size_t rank = 0;
    double tolerance = 0.0;          // effective absolute threshold (0 in exact mode)
    double smallest_accepted = 0.0;  // 0 when rank == 0
    double largest_rejected = 0.0;   // 0 when nothing was rejected
    std::vector<double> spectrum;    // singular values, descending (float mode only)
};

struct EigResult {
    std::vector<double> values;  // ascending
    Mat<double> vectors;         // columns are eigenvectors when requested
};

// Cyclic two-sided Jacobi for dense symmetric matrices. Robust for the sizes
// this project sees (n up to ~3000 in the structured paths, ~720 dense).
EigResult jacobi_eigen(const SymMat<double>& m, bool want_vectors, int max_sweeps = 60);

RankReport numeric_rank(const SymMat<double>& m, double tol = 1e-9);
RankReport numeric_rank(const SymMat<Rational>& m, double tol = 0.0);
// Absolute-threshold variant: counts singular values > abs_tol. Used where a
// construction's dynamic range makes the relative threshold meaningless (the
// wide-range appendix instances).
RankReport numeric_rank_abs(const SymMat<double>& m, double abs_tol);

std::size_t exact_rank(Mat<Rational> m);

// ---------------------------------------------------------------------------
// PSD check

template <class T>
struct PsdVerdict {
    bool psd = false;
    std::vector<T> witness;  // nonempty iff !psd; x with x^T M x < 0
    T witness_value = T(0);
    std::optional<std::size_t> negative_pivot_index;  // original index if a pivot went negative
};

// Diagonally pivoted symmetric elimination. psd = true iff the process never
// meets a pivot < -tol nor a 2x2 indefinite block (tiny diagonal against a
// large off-diagonal). tol = 0 is allowed only in exact arithmetic.
template <class T>
PsdVerdict<T> psd_check(const SymMat<T>& m, const T& tol);

inline PsdVerdict<double> psd_check(const SymMat<double>& m) { return psd_check(m, 1e-12); }
inline PsdVerdict<Rational> psd_check(const SymMat<Rational>& m) { return psd_check(m, Rational(0)); }

// ---------------------------------------------------------------------------
// Schur complement of the block indexed by `block`: M(J',J') - M(J',J) M(J,J)^{-1} M(J,J').
// Singular M(J,J) is accepted when the range condition of the PSD case holds
// (the system M(J,J) X = M(J,J') is consistent / has a small residual).

SymMat<Rational> schur_complement(const SymMat<Rational>& m,
                                  const std::vector<std::size_t>& block, double tol = 0.0);
SymMat<double> schur_complement(const SymMat<double>& m, const std::vector<std::size_t>& block,
                                double tol = 1e-9);

// ---------------------------------------------------------------------------
// Kronecker / svec / smat / determinant / adjugate

template <class T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const T& aij = a(i, j);
            if (scalar_traits<T>::sign(aij) == 0) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    r(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return r;
}

// svec lays out the lower triangle row-major: [m00, m10, m11, m20, m21, m22, ...].
template <class T>
std::vector<T> svec(const SymMat<T>& m) {
    return m.lower();
}

template <class T>
SymMat<T> smat(const std::vector<T>& v) {
    // invert k = n(n+1)/2
    std::size_t n = 0;
    while (n * (n + 1) / 2 < v.size()) ++n;
    if (n * (n + 1) / 2 != v.size()) throw std::invalid_argument("smat: not a triangular count");
    return SymMat<T>(n, v);
}

// Index of entry (i, j), i >= j, inside svec of an n x n symmetric matrix.
inline std::size_t svec_index(std::size_t i, std::size_t j) {
    if (j > i) std::swap(i, j);
    return i * (i + 1) / 2 + j;
}

// ring helpers so the cofactor templates work for scalars and for
// polynomial entries alike (a Poly literal needs its variable slate)
template <class R>
R zero_like(const R&) {
    return R(0);
}
template <class R>
R one_like(const R&) {
    return R(1);
}

// Laplace expansion; fine for the small orders used on polynomial rings.
// Requires ring ops +, -, *.
template <class R>
R det_cofactor(const Mat<R>& m) {
    const std::size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("det: not square");
    if (n == 0) throw std::invalid_argument("det_cofactor: empty matrix");
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    R acc = zero_like(m(0, 0));
    std::vector<std::size_t> cols(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) cols[c++] = k;
        Mat<R> sub(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t k = 0; k < n - 1; ++k) sub(i - 1, k) = m(i, cols[k]);
        R term = m(0, j) * det_cofactor(sub);
        if (j % 2 == 0)
            acc += term;
        else
            acc -= term;
    }
    return acc;
}

template <class R>
Mat<R> adjugate_cofactor(const Mat<R>& m) {
    const std::size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("adjugate: not square");
    Mat<R> adj(n, n);
    if (n == 0) return adj;
    if (n == 1) {
        adj(0, 0) = one_like(m(0, 0));
        return adj;
    }
    Mat<R> sub(n - 1, n - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t r = 0;
            for (std::size_t p = 0; p < n; ++p) {
                if (p == i) continue;
                std::size_t c = 0;
                for (std::size_t q = 0; q < n; ++q) {
                    if (q == j) continue;
                    sub(r, c) = m(p, q);
                    ++c;
                }
                ++r;
            }
            R cof = det_cofactor(sub);
            if ((i + j) % 2 == 1) cof = zero_like(cof) - cof;
            adj(j, i) = cof;  // transpose of cofactor matrix
        }
    return adj;
}

Rational det(const SymMat<Rational>& m);
double det(const SymMat<double>& m);

template <class T>
SymMat<T> adjugate(const SymMat<T>& m) {
    return SymMat<T>::lower_of(adjugate_cofactor(m.dense()));
}

// ---------------------------------------------------------------------------
// Linear system reduction (the Algorithm 1 work horse)

enum class LinStatus { inconsistent, unique, underdetermined };

template <class T>
struct LinearReduction {
    LinStatus status = LinStatus::underdetermined;
    std::size_t rank = 0;
    Mat<T> basis_lhs;           // rank x vars, full row rank
    std::vector<T> basis_rhs;   // rank
    std::vector<T> solution;    // filled when status == unique
};

LinearReduction<Rational> reduce_linear(const Mat<Rational>& lhs,
                                        const std::vector<Rational>& rhs, double tol = 0.0);
LinearReduction<double> reduce_linear(const Mat<double>& lhs, const std::vector<double>& rhs,
                                      double tol = 1e-10);

// Square solve; throws SingularBlockError when singular (to tolerance).
std::vector<Rational> solve_square(const Mat<Rational>& a, const std::vector<Rational>& b);
std::vector<double> solve_square(const Mat<double>& a, const std::vector<double>& b,
                                 double tol = 1e-12);

// A X = B column-wise; exact consistency required, else SingularBlockError.
Mat<Rational> solve_matrix(const Mat<Rational>& a, const Mat<Rational>& b);

Mat<Rational> inverse(const SymMat<Rational>& m);
Mat<double> inverse(const SymMat<double>& m);

// ---------------------------------------------------------------------------
// Norms

inline double fro_norm_sq(const Mat<double>& m) {
    return kern::nrm2sq(m.data().data(), m.data().size());
}
inline double fro_norm(const Mat<double>& m) { return std::sqrt(fro_norm_sq(m)); }

inline double fro_norm(const SymMat<double>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            s += (i == j ? 1.0 : 2.0) * m(i, j) * m(i, j);
    return std::sqrt(s);
}

inline Rational fro_norm_sq(const SymMat<Rational>& m) {
    Rational s(0);
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            Rational t = m(i, j) * m(i, j);
            s += (i == j) ? t : (t + t);
        }
    return s;
}

inline double max_abs(const SymMat<double>& m) {
    double s = 0.0;
    for (double v : m.lower()) s = std::max(s, std::fabs(v));
    return s;
}

// ---------------------------------------------------------------------------
// implementation: psd_check (shared template)

template <class T>
PsdVerdict<T> psd_check(const SymMat<T>& m, const T& tol) {
    using st = scalar_traits<T>;
    if constexpr (!st::exact) {
        if (!(tol >= T(0))) throw std::invalid_argument("psd_check: tol must be >= 0");
        if (!m.all_finite()) throw std::invalid_argument("psd_check: non-finite entries");
        if (st::sign(tol) == 0 && m.n() > 0) {
            // tol = 0 is reserved for exact mode
            throw std::invalid_argument("psd_check: tol = 0 requires exact mode");
        }
    } else {
        if (st::sign(tol) < 0) throw std::invalid_argument("psd_check: tol must be >= 0");
    }

    const std::size_t n = m.n();
    PsdVerdict<T> verdict;
    if (n == 0) {
        verdict.psd = true;
        return verdict;
    }

    Mat<T> w = m.dense();
    std::vector<bool> eliminated(n, false);
    std::vector<std::size_t> pivots;            // original indices, in elimination order
    std::vector<std::vector<T>> lcols;          // l_k over original indices (l_k[p_k] = 1)

    auto lift_witness = [&](const std::vector<T>& y) {
        // y lives on the remaining coordinates (original indexing, zero on
        // eliminated ones); solve the unit-triangular system to cancel the
        // eliminated pivots so that x^T M x equals y^T S y.
        std::vector<T> x = y;
        for (std::size_t k = pivots.size(); k-- > 0;) {
            T acc(0);
            const auto& l = lcols[k];
            for (std::size_t i = 0; i < n; ++i) {
                if (i == pivots[k]) continue;
                if (st::sign(x[i]) != 0 && st::sign(l[i]) != 0) acc += l[i] * x[i];
            }
            x[pivots[k]] = T(0) - acc;
        }
        return x;
    };

    auto finish_not_psd = [&](const std::vector<T>& y,
                              std::optional<std::size_t> neg_idx) -> PsdVerdict<T> {
        std::vector<T> x = lift_witness(y);
        T val = quad_form(m, x);
        if (st::sign(val) < 0) {
            verdict.psd = false;
            verdict.witness = std::move(x);
            verdict.witness_value = val;
            verdict.negative_pivot_index = neg_idx;
            return verdict;
        }
        if constexpr (!st::exact) {
            // Numerical distortion in the lift: certify through the extreme
            // eigenpair instead.
            EigResult e = jacobi_eigen(m, true);
            std::vector<T> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, 0);
            T val2 = quad_form(m, v);
            if (st::sign(val2) < 0) {
                verdict.psd = false;
                verdict.witness = std::move(v);
                verdict.witness_value = val2;
                verdict.negative_pivot_index = neg_idx;
                return verdict;
            }
            verdict.psd = true;  // indistinguishable from PSD at this tolerance
            return verdict;
        } else {
            throw std::logic_error("psd_check: exact lift produced nonnegative value");
        }
    };

    for (std::size_t step = 0; step < n; ++step) {
        // largest remaining diagonal entry
        std::size_t p = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (eliminated[i]) continue;
            if (p == n || w(i, i) > w(p, p)) p = i;
        }
        if (p == n) break;
        const T dmax = w(p, p);

        if (st::sign(dmax + tol) < 0) {
            // pivot below -tol
            std::vector<T> y(n, T(0));
            y[p] = T(1);
            return finish_not_psd(y, p);
        }

        if (!(dmax > tol)) {
            // All remaining diagonal entries are within [-tol, tol]; PSD now
            // requires the remaining off-diagonal entries to be tiny as well.
            std::size_t bi = n, bj = n;
            T best(0);
            for (std::size_t i = 0; i < n; ++i) {
                if (eliminated[i]) continue;
                for (std::size_t j = 0; j < i; ++j) {
                    if (eliminated[j]) continue;
                    T a = st::abs(w(i, j));
                    if (a > best) {
                        best = a;
                        bi = i;
                        bj = j;
                    }
                }
            }
            T two_tol = tol + tol;
            if (bi < n && best > two_tol) {
                // 2x2 indefinite block
                std::vector<T> y(n, T(0));
                y[bi] = T(1);
                y[bj] = st::sign(w(bi, bj)) > 0 ? T(-1) : T(1);
                return finish_not_psd(y, std::nullopt);
            }
            verdict.psd = true;
            return verdict;
        }

        // eliminate pivot p
        std::vector<T> l(n, T(0));
        l[p] = T(1);
        for (std::size_t i = 0; i < n; ++i)
            if (!eliminated[i] && i != p) l[i] = w(i, p) / dmax;

        if constexpr (std::is_same_v<T, double>) {
            // rank-1 update on remaining rows via kernels; eliminated columns
            // get touched too but are never read again
            for (std::size_t i = 0; i < n; ++i) {
                if (eliminated[i] || i == p) continue;
                kern::axpy(-l[i], w.row(p), w.row(i), n);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (eliminated[i] || i == p) continue;
                for (std::size_t j = 0; j <= i; ++j) {
                    if (eliminated[j] || j == p) continue;
                    w(i, j) -= l[i] * (dmax * l[j]);
                    w(j, i) = w(i, j);
                }
            }
        }
        eliminated[p] = true;
        pivots.push_back(p);
        lcols.push_back(std::move(l));
    }

    verdict.psd = true;
    return verdict;
}

}  // namespace lrpd
