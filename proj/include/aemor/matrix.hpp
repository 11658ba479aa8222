#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "aemor/errors.hpp"

namespace aemor {

using vec = std::vector<double>;

/// Dense row-major matrix of double. Everything downstream (network weights,
/// snapshot blocks, reduced operators) is stored in this one layout so payloads
/// can be written to disk without reshuffling.
class matrix {
public:
    matrix() = default;
    matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static matrix identity(std::size_t n) {
        matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

    vec row(std::size_t i) const {
        return vec(row_ptr(i), row_ptr(i) + cols_);
    }
    void set_row(std::size_t i, const vec& v) {
        if (v.size() != cols_)
            throw contract_error("set_row: length " + std::to_string(v.size()) +
                                 " into matrix with " + std::to_string(cols_) + " columns");
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
    }

    vec& storage() { return data_; }
    const vec& storage() const { return data_; }

    bool same_shape(const matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    vec data_;
};

inline matrix transpose(const matrix& a) {
    matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline matrix matmul(const matrix& a, const matrix& b) {
    if (a.cols() != b.rows())
        throw contract_error("matmul: inner dimensions " + shape_str(a.rows(), a.cols()) +
                             " * " + shape_str(b.rows(), b.cols()));
    matrix c(a.rows(), b.cols());
    // i-k-j order keeps both streams sequential in the row-major layout.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

inline vec matvec(const matrix& a, const vec& x) {
    if (a.cols() != x.size())
        throw contract_error("matvec: matrix " + shape_str(a.rows(), a.cols()) +
                             " times vector of length " + std::to_string(x.size()));
    vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// y = A^T x without forming the transpose.
inline vec matvec_t(const matrix& a, const vec& x) {
    if (a.rows() != x.size())
        throw contract_error("matvec_t: matrix " + shape_str(a.rows(), a.cols()) +
                             " transposed times vector of length " + std::to_string(x.size()));
    vec y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += arow[j] * xi;
    }
    return y;
}

inline double dot(const vec& a, const vec& b) {
    if (a.size() != b.size())
        throw contract_error("dot: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const vec& a) { return std::sqrt(dot(a, a)); }

inline double frobenius_norm(const matrix& a) {
    double s = 0.0;
    for (double x : a.storage()) s += x * x;
    return std::sqrt(s);
}

inline double max_abs(const matrix& a) {
    double m = 0.0;
    for (double x : a.storage()) m = std::max(m, std::abs(x));
    return m;
}

/// Guard so constant fields cannot blow up normalized losses.
inline constexpr double variance_floor = 1e-12;

/// Population variance (divide by N, not N-1), clamped from below at the
/// floor: callers divide by this.
inline double variance(const vec& v) {
    if (v.empty()) throw contract_error("variance: empty vector");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::max(s / static_cast<double>(v.size()), variance_floor);
}

/// Solve K x = r by Gaussian elimination with partial pivoting. K is copied.
/// A pivot below 1e-14 * max|K| aborts: the system is singular to working
/// precision and a garbage solution would silently poison everything downstream.
inline vec solve_linear(const matrix& k_in, const vec& r_in) {
    if (k_in.rows() != k_in.cols())
        throw contract_error("solve_linear: matrix " + shape_str(k_in.rows(), k_in.cols()) +
                             " is not square");
    if (k_in.rows() != r_in.size())
        throw contract_error("solve_linear: matrix " + shape_str(k_in.rows(), k_in.cols()) +
                             " with rhs of length " + std::to_string(r_in.size()));
    const std::size_t n = k_in.rows();
    matrix k = k_in;
    vec x = r_in;
    const double pivot_tol = 1e-14 * max_abs(k_in);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double piv_abs = std::abs(k(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            const double a = std::abs(k(i, col));
            if (a > piv_abs) { piv_abs = a; piv = i; }
        }
        if (piv_abs <= pivot_tol)
            throw numerical_error("solve_linear: singular system, pivot " +
                                  std::to_string(piv_abs) + " at column " + std::to_string(col));
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(k(piv, j), k(col, j));
            std::swap(x[piv], x[col]);
        }
        const double inv_piv = 1.0 / k(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double factor = k(i, col) * inv_piv;
            if (factor == 0.0) continue;
            k(i, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) k(i, j) -= factor * k(col, j);
            x[i] -= factor * x[col];
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= k(ii, j) * x[j];
        x[ii] = s / k(ii, ii);
    }
    return x;
}

} // namespace aemor
