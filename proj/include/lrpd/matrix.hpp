#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "lrpd/scalar.hpp"

namespace lrpd {

// Dense rectangular matrix, row-major.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, T(0)) {}
    Mat(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), a_(std::move(data)) {
        if (a_.size() != rows_ * cols_) throw std::invalid_argument("Mat: data size mismatch");
    }
    Mat(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("Mat: ragged initializer");
            for (auto& v : r) a_.push_back(v);
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    T* row(std::size_t i) { return a_.data() + i * cols_; }
    const T* row(std::size_t i) const { return a_.data() + i * cols_; }
    std::vector<T>& data() { return a_; }
    const std::vector<T>& data() const { return a_; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat::operator*: dimension mismatch");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& aik = (*this)(i, k);
                if (scalar_traits<T>::sign(aik) == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        }
        return r;
    }

    Mat operator+(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }
    Mat operator-(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }
    Mat operator*(const T& s) const {
        Mat r = *this;
        for (auto& v : r.a_) v *= s;
        return r;
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

private:
    void check_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Mat: shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

// Symmetric matrix; only the lower triangle is stored (row-major, diagonal
// included), so symmetry holds by construction.
template <class T>
class SymMat {
public:
    SymMat() = default;
    explicit SymMat(std::size_t n) : n_(n), low_(n * (n + 1) / 2, T(0)) {}
    SymMat(std::size_t n, std::vector<T> lower) : n_(n), low_(std::move(lower)) {
        if (low_.size() != n_ * (n_ + 1) / 2)
            throw std::invalid_argument("SymMat: lower-triangle size mismatch");
    }
    SymMat(std::initializer_list<std::initializer_list<T>> rows) {
        Mat<T> d(rows);
        *this = from_dense(d);
    }

    static SymMat identity(std::size_t n) {
        SymMat m(n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, T(1));
        return m;
    }

    // Requires an exactly symmetric dense input.
    static SymMat from_dense(const Mat<T>& d) {
        if (d.rows() != d.cols()) throw std::invalid_argument("SymMat::from_dense: not square");
        SymMat m(d.rows());
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                if (!(d(i, j) == d(j, i)))
                    throw std::invalid_argument("SymMat::from_dense: not symmetric");
                m.at(i, j) = d(i, j);
            }
        return m;
    }

    // Symmetrizes via the lower triangle, no symmetry check.
    static SymMat lower_of(const Mat<T>& d) {
        if (d.rows() != d.cols()) throw std::invalid_argument("SymMat::lower_of: not square");
        SymMat m(d.rows());
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = d(i, j);
        return m;
    }

    std::size_t n() const { return n_; }

    const T& operator()(std::size_t i, std::size_t j) const {
        return i >= j ? low_[idx(i, j)] : low_[idx(j, i)];
    }
    void set(std::size_t i, std::size_t j, const T& v) {
        low_[i >= j ? idx(i, j) : idx(j, i)] = v;
    }
    T& at(std::size_t i, std::size_t j) { return low_[i >= j ? idx(i, j) : idx(j, i)]; }

    std::vector<T>& lower() { return low_; }
    const std::vector<T>& lower() const { return low_; }

    Mat<T> dense() const {
        Mat<T> d(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j) d(i, j) = d(j, i) = low_[idx(i, j)];
        return d;
    }

    SymMat principal_submatrix(const std::vector<std::size_t>& idxs) const {
        SymMat s(idxs.size());
        for (std::size_t a = 0; a < idxs.size(); ++a)
            for (std::size_t b = 0; b <= a; ++b) s.at(a, b) = (*this)(idxs[a], idxs[b]);
        return s;
    }

    Mat<T> submatrix(const std::vector<std::size_t>& ri, const std::vector<std::size_t>& ci) const {
        Mat<T> s(ri.size(), ci.size());
        for (std::size_t a = 0; a < ri.size(); ++a)
            for (std::size_t b = 0; b < ci.size(); ++b) s(a, b) = (*this)(ri[a], ci[b]);
        return s;
    }

    SymMat operator+(const SymMat& o) const {
        check_same(o);
        SymMat r = *this;
        for (std::size_t i = 0; i < low_.size(); ++i) r.low_[i] += o.low_[i];
        return r;
    }
    SymMat operator-(const SymMat& o) const {
        check_same(o);
        SymMat r = *this;
        for (std::size_t i = 0; i < low_.size(); ++i) r.low_[i] -= o.low_[i];
        return r;
    }
    SymMat operator*(const T& s) const {
        SymMat r = *this;
        for (auto& v : r.low_) v *= s;
        return r;
    }

    SymMat& add_diag(const std::vector<T>& d) {
        if (d.size() != n_) throw std::invalid_argument("SymMat::add_diag: size mismatch");
        for (std::size_t i = 0; i < n_; ++i) low_[idx(i, i)] += d[i];
        return *this;
    }
    SymMat& sub_diag(const std::vector<T>& d) {
        if (d.size() != n_) throw std::invalid_argument("SymMat::sub_diag: size mismatch");
        for (std::size_t i = 0; i < n_; ++i) low_[idx(i, i)] -= d[i];
        return *this;
    }

    friend bool operator==(const SymMat& a, const SymMat& b) {
        return a.n_ == b.n_ && a.low_ == b.low_;
    }

    bool all_finite() const {
        for (const auto& v : low_)
            if (!scalar_traits<T>::finite(v)) return false;
        return true;
    }

private:
    static std::size_t idx(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }
    void check_same(const SymMat& o) const {
        if (n_ != o.n_) throw std::invalid_argument("SymMat: shape mismatch");
    }

    std::size_t n_ = 0;
    std::vector<T> low_;
};

template <class T>
Mat<T> to_mat(const SymMat<T>& s) {
    return s.dense();
}

// x^T M y for dense symmetric M.
template <class T>
T quad_form(const SymMat<T>& m, const std::vector<T>& x) {
    if (x.size() != m.n()) throw std::invalid_argument("quad_form: size mismatch");
    T s(0);
    for (std::size_t i = 0; i < m.n(); ++i) {
        T row(0);
        for (std::size_t j = 0; j < m.n(); ++j) row += m(i, j) * x[j];
        s += x[i] * row;
    }
    return s;
}

template <class T>
std::vector<T> matvec(const SymMat<T>& m, const std::vector<T>& x) {
    std::vector<T> y(m.n(), T(0));
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j < m.n(); ++j) y[i] += m(i, j) * x[j];
    return y;
}

template <class T>
SymMat<double> to_float(const SymMat<T>& m) {
    SymMat<double> f(m.n());
    for (std::size_t i = 0; i < m.lower().size(); ++i)
        f.lower()[i] = scalar_traits<T>::to_double(m.lower()[i]);
    return f;
}

template <class T>
Mat<double> to_float(const Mat<T>& m) {
    Mat<double> f(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            f(i, j) = scalar_traits<T>::to_double(m(i, j));
    return f;
}

inline SymMat<Rational> to_exact(const SymMat<double>& m) {
    SymMat<Rational> r(m.n());
    for (std::size_t i = 0; i < m.lower().size(); ++i)
        r.lower()[i] = Rational::from_double(m.lower()[i]);
    return r;
}

}  // namespace lrpd
