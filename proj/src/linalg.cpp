#include "lrpd/linalg.hpp"

#include <cassert>
#include <cmath>

namespace lrpd {

// ---------------------------------------------------------------------------
// Jacobi eigensolver

EigResult jacobi_eigen(const SymMat<double>& m, bool want_vectors, int max_sweeps) {
    const std::size_t n = m.n();
    Mat<double> a = m.dense();
    Mat<double> v;
    if (want_vectors) v = Mat<double>::identity(n);

    EigResult out;
    if (n == 0) return out;
    if (n == 1) {
        out.values = {a(0, 0)};
        if (want_vectors) out.vectors = v;
        return out;
    }

    const double norm_sq = fro_norm_sq(a);
    const double stop_off_sq = std::max(norm_sq * 1e-30, 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off_sq += 2.0 * a(i, j) * a(i, j);
        if (off_sq <= stop_off_sq) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                double app = a(p, p), aqq = a(q, q);
                // rotation annihilating a(p,q)
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                kern::rot(a.row(p), a.row(q), n, c, s);
                // mirror into columns, then pin the 2x2 block with the stable
                // closed forms
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    a(i, p) = a(p, i);
                    a(i, q) = a(q, i);
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                if (want_vectors) kern::rot(v.row(p), v.row(q), n, c, s);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.values[k] = a(order[k], order[k]);
    if (want_vectors) {
        // v rows currently hold eigenvectors (accumulated on the left);
        // return them as columns sorted by eigenvalue
        out.vectors = Mat<double>(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(order[k], i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rank

namespace {

RankReport rank_from_spectrum(std::vector<double> sing, double threshold) {
    std::sort(sing.begin(), sing.end(), std::greater<double>());
    RankReport r;
    r.tolerance = threshold;
    r.spectrum = sing;
    for (double s : sing) {
        if (s > threshold)
            ++r.rank;
        else
            break;
    }
    r.smallest_accepted = r.rank ? sing[r.rank - 1] : 0.0;
    r.largest_rejected = r.rank < sing.size() ? sing[r.rank] : 0.0;
    return r;
}

}  // namespace

RankReport numeric_rank(const SymMat<double>& m, double tol) {
    if (tol <= 0) throw std::invalid_argument("numeric_rank: tol must be > 0 in float mode");
    if (!m.all_finite()) throw std::invalid_argument("numeric_rank: non-finite entries");
    EigResult e = jacobi_eigen(m, false);
    std::vector<double> sing(e.values.size());
    for (std::size_t i = 0; i < sing.size(); ++i) sing[i] = std::fabs(e.values[i]);
    double smax = sing.empty() ? 0.0 : *std::max_element(sing.begin(), sing.end());
    return rank_from_spectrum(std::move(sing), tol * smax);
}

RankReport numeric_rank_abs(const SymMat<double>& m, double abs_tol) {
    if (abs_tol <= 0) throw std::invalid_argument("numeric_rank_abs: tol must be > 0");
    if (!m.all_finite()) throw std::invalid_argument("numeric_rank_abs: non-finite entries");
    EigResult e = jacobi_eigen(m, false);
    std::vector<double> sing(e.values.size());
    for (std::size_t i = 0; i < sing.size(); ++i) sing[i] = std::fabs(e.values[i]);
    return rank_from_spectrum(std::move(sing), abs_tol);
}

std::size_t exact_rank(Mat<Rational> m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t rank = 0;
    std::size_t pr = 0;
    for (std::size_t pc = 0; pc < cols && pr < rows; ++pc) {
        std::size_t pivot = rows;
        for (std::size_t i = pr; i < rows; ++i)
            if (!m(i, pc).is_zero()) {
                pivot = i;
                break;
            }
        if (pivot == rows) continue;
        if (pivot != pr)
            for (std::size_t j = pc; j < cols; ++j) std::swap(m(pr, j), m(pivot, j));
        const Rational inv = Rational(1) / m(pr, pc);
        for (std::size_t i = pr + 1; i < rows; ++i) {
            if (m(i, pc).is_zero()) continue;
            Rational f = m(i, pc) * inv;
            for (std::size_t j = pc; j < cols; ++j) m(i, j) -= f * m(pr, j);
        }
        ++pr;
        ++rank;
    }
    return rank;
}

RankReport numeric_rank(const SymMat<Rational>& m, double /*tol*/) {
    RankReport r;
    r.rank = exact_rank(m.dense());
    r.tolerance = 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Linear reduction

LinearReduction<Rational> reduce_linear(const Mat<Rational>& lhs,
                                        const std::vector<Rational>& rhs, double /*tol*/) {
    const std::size_t rows = lhs.rows(), vars = lhs.cols();
    if (rhs.size() != rows) throw std::invalid_argument("reduce_linear: rhs size mismatch");
    Mat<Rational> a = lhs;
    std::vector<Rational> b = rhs;

    std::vector<std::size_t> pivot_col;
    std::size_t pr = 0;
    for (std::size_t pc = 0; pc < vars && pr < rows; ++pc) {
        std::size_t pivot = rows;
        for (std::size_t i = pr; i < rows; ++i)
            if (!a(i, pc).is_zero()) {
                pivot = i;
                break;
            }
        if (pivot == rows) continue;
        if (pivot != pr) {
            for (std::size_t j = 0; j < vars; ++j) std::swap(a(pr, j), a(pivot, j));
            std::swap(b[pr], b[pivot]);
        }
        const Rational inv = Rational(1) / a(pr, pc);
        for (std::size_t j = pc; j < vars; ++j) a(pr, j) *= inv;
        b[pr] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == pr || a(i, pc).is_zero()) continue;
            Rational f = a(i, pc);
            for (std::size_t j = pc; j < vars; ++j) a(i, j) -= f * a(pr, j);
            b[i] -= f * b[pr];
        }
        pivot_col.push_back(pc);
        ++pr;
    }

    LinearReduction<Rational> out;
    out.rank = pr;
    for (std::size_t i = pr; i < rows; ++i)
        if (!b[i].is_zero()) {
            out.status = LinStatus::inconsistent;
            return out;
        }

    out.basis_lhs = Mat<Rational>(pr, vars);
    out.basis_rhs.resize(pr);
    for (std::size_t i = 0; i < pr; ++i) {
        for (std::size_t j = 0; j < vars; ++j) out.basis_lhs(i, j) = a(i, j);
        out.basis_rhs[i] = b[i];
    }

    if (pr == vars) {
        out.status = LinStatus::unique;
        out.solution.resize(vars);
        for (std::size_t i = 0; i < pr; ++i) out.solution[pivot_col[i]] = b[i];
    } else {
        out.status = LinStatus::underdetermined;
    }
    return out;
}

LinearReduction<double> reduce_linear(const Mat<double>& lhs, const std::vector<double>& rhs,
                                      double tol) {
    const std::size_t rows = lhs.rows(), vars = lhs.cols();
    if (rhs.size() != rows) throw std::invalid_argument("reduce_linear: rhs size mismatch");

    // Householder QR with column pivoting on [lhs], rhs carried along.
    Mat<double> a = lhs;
    std::vector<double> b = rhs;
    std::vector<std::size_t> perm(vars);
    std::iota(perm.begin(), perm.end(), 0);

    const std::size_t kmax = std::min(rows, vars);
    std::vector<double> colsq(vars, 0.0);
    for (std::size_t j = 0; j < vars; ++j)
        for (std::size_t i = 0; i < rows; ++i) colsq[j] += a(i, j) * a(i, j);

    double r00 = 0.0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < kmax; ++k) {
        // pivot column with the largest remaining norm
        std::size_t best = k;
        double best_sq = -1.0;
        for (std::size_t j = k; j < vars; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < rows; ++i) s += a(i, j) * a(i, j);
            colsq[j] = s;
            if (s > best_sq) {
                best_sq = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, k), a(i, best));
            std::swap(colsq[k], colsq[best]);
            std::swap(perm[k], perm[best]);
        }
        double col_norm = std::sqrt(std::max(best_sq, 0.0));
        if (k == 0) r00 = col_norm;
        if (col_norm <= tol * std::max(r00, 1e-300)) break;

        // Householder vector for column k below row k
        double alpha = a(k, k) >= 0 ? -col_norm : col_norm;
        std::vector<double> u(rows - k, 0.0);
        u[0] = a(k, k) - alpha;
        for (std::size_t i = k + 1; i < rows; ++i) u[i - k] = a(i, k);
        double usq = kern::nrm2sq(u.data(), u.size());
        if (usq > 0) {
            for (std::size_t j = k; j < vars; ++j) {
                double d = 0.0;
                for (std::size_t i = k; i < rows; ++i) d += u[i - k] * a(i, j);
                double f = 2.0 * d / usq;
                for (std::size_t i = k; i < rows; ++i) a(i, j) -= f * u[i - k];
            }
            double d = 0.0;
            for (std::size_t i = k; i < rows; ++i) d += u[i - k] * b[i];
            double f = 2.0 * d / usq;
            for (std::size_t i = k; i < rows; ++i) b[i] -= f * u[i - k];
        }
        a(k, k) = alpha;
        for (std::size_t i = k + 1; i < rows; ++i) a(i, k) = 0.0;
        ++rank;
    }

    LinearReduction<double> out;
    out.rank = rank;

    double bnorm = std::sqrt(kern::nrm2sq(rhs.data(), rhs.size()));
    double scale = std::max({r00, bnorm, 1.0});
    for (std::size_t i = rank; i < rows; ++i)
        if (std::fabs(b[i]) > 1e-8 * scale) {
            out.status = LinStatus::inconsistent;
            return out;
        }

    out.basis_lhs = Mat<double>(rank, vars);
    out.basis_rhs.resize(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        for (std::size_t j = 0; j < vars; ++j) out.basis_lhs(i, perm[j]) = a(i, j);
        out.basis_rhs[i] = b[i];
    }

    if (rank == vars) {
        out.status = LinStatus::unique;
        std::vector<double> x(vars, 0.0);
        for (std::size_t i = vars; i-- > 0;) {
            double s = b[i];
            for (std::size_t j = i + 1; j < vars; ++j) s -= a(i, j) * x[j];
            x[i] = s / a(i, i);
        }
        out.solution.resize(vars);
        for (std::size_t j = 0; j < vars; ++j) out.solution[perm[j]] = x[j];
    } else {
        out.status = LinStatus::underdetermined;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Square solves / inverse / det

std::vector<Rational> solve_square(const Mat<Rational>& a, const std::vector<Rational>& b) {
    auto red = reduce_linear(a, b, 0.0);
    if (red.status != LinStatus::unique)
        throw SingularBlockError("solve_square: singular matrix (exact)");
    return red.solution;
}

std::vector<double> solve_square(const Mat<double>& a, const std::vector<double>& b, double tol) {
    auto red = reduce_linear(a, b, tol);
    if (red.status != LinStatus::unique)
        throw SingularBlockError("solve_square: singular matrix (float)");
    return red.solution;
}

Mat<Rational> solve_matrix(const Mat<Rational>& a, const Mat<Rational>& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("solve_matrix: shape mismatch");
    const std::size_t n = a.rows(), va = a.cols(), nb = b.cols();
    // one elimination over the block right-hand side
    Mat<Rational> w(n, va + nb);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < va; ++j) w(i, j) = a(i, j);
        for (std::size_t j = 0; j < nb; ++j) w(i, va + j) = b(i, j);
    }
    std::vector<std::size_t> pivot_col;
    std::size_t pr = 0;
    for (std::size_t pc = 0; pc < va && pr < n; ++pc) {
        std::size_t pivot = n;
        for (std::size_t i = pr; i < n; ++i)
            if (!w(i, pc).is_zero()) {
                pivot = i;
                break;
            }
        if (pivot == n) continue;
        if (pivot != pr)
            for (std::size_t j = 0; j < va + nb; ++j) std::swap(w(pr, j), w(pivot, j));
        const Rational inv = Rational(1) / w(pr, pc);
        for (std::size_t j = pc; j < va + nb; ++j) w(pr, j) *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == pr || w(i, pc).is_zero()) continue;
            Rational f = w(i, pc);
            for (std::size_t j = pc; j < va + nb; ++j) w(i, j) -= f * w(pr, j);
        }
        pivot_col.push_back(pc);
        ++pr;
    }
    // consistency of the dropped rows
    for (std::size_t i = pr; i < n; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            if (!w(i, va + j).is_zero())
                throw SingularBlockError("solve_matrix: inconsistent system");
    Mat<Rational> x(va, nb);
    for (std::size_t i = 0; i < pr; ++i)
        for (std::size_t j = 0; j < nb; ++j) x(pivot_col[i], j) = w(i, va + j);
    return x;
}

Mat<Rational> inverse(const SymMat<Rational>& m) {
    const std::size_t n = m.n();
    Mat<Rational> d = m.dense();
    Mat<Rational> id = Mat<Rational>::identity(n);
    Mat<Rational> x = solve_matrix(d, id);
    // solve_matrix succeeds on singular-but-consistent systems; an inverse
    // requires full rank
    if (exact_rank(d) != n) throw SingularBlockError("inverse: singular matrix");
    return x;
}

Mat<double> inverse(const SymMat<double>& m) {
    const std::size_t n = m.n();
    Mat<double> a = m.dense();
    Mat<double> inv = Mat<double>::identity(n);
    // partial-pivot Gauss-Jordan
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
        if (a(p, k) == 0.0) throw SingularBlockError("inverse: singular matrix (float)");
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
                std::swap(inv(k, j), inv(p, j));
            }
        double piv = a(k, k);
        kern::scal(1.0 / piv, a.row(k), n);
        kern::scal(1.0 / piv, inv.row(k), n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0.0) continue;
            double f = a(i, k);
            kern::axpy(-f, a.row(k), a.row(i), n);
            kern::axpy(-f, inv.row(k), inv.row(i), n);
        }
    }
    return inv;
}

Rational det(const SymMat<Rational>& m) {
    const std::size_t n = m.n();
    if (n <= 4) return det_cofactor(m.dense());
    Mat<Rational> a = m.dense();
    Rational d(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = n;
        for (std::size_t i = k; i < n; ++i)
            if (!a(i, k).is_zero()) {
                p = i;
                break;
            }
        if (p == n) return Rational(0);
        if (p != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(p, j));
            d = -d;
        }
        d *= a(k, k);
        Rational inv = Rational(1) / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k).is_zero()) continue;
            Rational f = a(i, k) * inv;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

double det(const SymMat<double>& m) {
    const std::size_t n = m.n();
    if (n <= 4) return det_cofactor(m.dense());
    Mat<double> a = m.dense();
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
        if (a(p, k) == 0.0) return 0.0;
        if (p != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(p, j));
            d = -d;
        }
        d *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Schur complement

namespace {

template <class T>
std::vector<std::size_t> complement_of(std::size_t n, const std::vector<std::size_t>& j) {
    std::vector<bool> in(n, false);
    for (auto i : j) {
        if (i >= n) throw std::invalid_argument("schur_complement: index out of range");
        if (in[i]) throw std::invalid_argument("schur_complement: duplicate index");
        in[i] = true;
    }
    std::vector<std::size_t> comp;
    for (std::size_t i = 0; i < n; ++i)
        if (!in[i]) comp.push_back(i);
    return comp;
}

}  // namespace

SymMat<Rational> schur_complement(const SymMat<Rational>& m,
                                  const std::vector<std::size_t>& block, double /*tol*/) {
    auto comp = complement_of<Rational>(m.n(), block);
    Mat<Rational> a = m.principal_submatrix(block).dense();
    Mat<Rational> w = m.submatrix(block, comp);  // |J| x |J'|
    Mat<Rational> x = solve_matrix(a, w);        // throws on inconsistency
    Mat<Rational> update = w.transposed() * x;
    Mat<Rational> rest = m.principal_submatrix(comp).dense() - update;
    return SymMat<Rational>::lower_of(rest);
}

SymMat<double> schur_complement(const SymMat<double>& m, const std::vector<std::size_t>& block,
                                double tol) {
    auto comp = complement_of<double>(m.n(), block);
    SymMat<double> a = m.principal_submatrix(block);
    Mat<double> w = m.submatrix(block, comp);  // |J| x |J'|

    EigResult e = jacobi_eigen(a, true);
    double lmax = 0.0;
    for (double v : e.values) lmax = std::max(lmax, std::fabs(v));
    const std::size_t k = block.size();

    // X = A^+ W via the eigendecomposition, dropping modes below tol * |lambda|_max
    Mat<double> x(k, comp.size());
    for (std::size_t t = 0; t < k; ++t) {
        if (std::fabs(e.values[t]) <= tol * std::max(lmax, 1e-300)) continue;
        for (std::size_t c = 0; c < comp.size(); ++c) {
            double proj = 0.0;
            for (std::size_t i = 0; i < k; ++i) proj += e.vectors(i, t) * w(i, c);
            proj /= e.values[t];
            for (std::size_t i = 0; i < k; ++i) x(i, c) += e.vectors(i, t) * proj;
        }
    }

    // range condition: A X must reproduce W
    Mat<double> ax = a.dense() * x;
    double resid = fro_norm(ax - w);
    double wn = fro_norm(w);
    if (resid > std::max(tol * wn, 1e-300) && wn > 0)
        throw SingularBlockError("schur_complement: block singular and range condition fails");

    Mat<double> rest = m.principal_submatrix(comp).dense() - w.transposed() * x;
    // symmetrize against roundoff
    for (std::size_t i = 0; i < rest.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double avg = 0.5 * (rest(i, j) + rest(j, i));
            rest(i, j) = rest(j, i) = avg;
        }
    return SymMat<double>::lower_of(rest);
}

}  // namespace lrpd
