#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sphdec/errors.hpp"

namespace sphdec {

// Dense row-major matrix of doubles. When a matrix holds a lattice basis,
// its rows are the basis vectors, so a point with coefficient vector u is
// the row-vector product u * M.
class matrix {
public:
    matrix() = default;

    matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static matrix identity(std::size_t n) {
        matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(v_.data() + i * cols_, cols_);
    }

    bool operator==(const matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

inline bool all_finite(const matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j))) return false;
    return true;
}

inline matrix transpose(const matrix& a) {
    matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline matrix matmul(const matrix& a, const matrix& b) {
    if (a.cols() != b.rows()) throw argument_error("matmul: inner dimensions differ");
    matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

// a * a^T; two bases span the same lattice up to rotation iff their Gram
// matrices agree.
inline matrix gram(const matrix& a) {
    matrix g(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * a(j, k);
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

inline double max_abs(const matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

inline double max_abs_diff(const matrix& a, const matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw argument_error("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
    return m;
}

// u * M for a row vector u.
template <class T>
std::vector<double> row_times_matrix(std::span<const T> u, const matrix& m) {
    if (u.size() != m.rows()) throw argument_error("row_times_matrix: length mismatch");
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double ui = static_cast<double>(u[i]);
        if (ui == 0.0) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += ui * m(i, j);
    }
    return out;
}

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_scalar(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Text form of a basis: a header line "rows cols", then one line per row of
// whitespace-separated decimal scalars. Bases must satisfy rows <= cols and
// contain only finite values.
inline matrix read_matrix(std::istream& in) {
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw io_error("matrix header: expected \"rows cols\"");
    if (rows == 0 || cols == 0) throw io_error("matrix header: dimensions must be positive");
    if (rows > cols) throw io_error("matrix header: more rows than columns");
    matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if (!(in >> m(i, j))) throw io_error("matrix body: missing or malformed entry");
            if (!std::isfinite(m(i, j))) throw io_error("matrix body: non-finite entry");
        }
    return m;
}

inline void write_matrix(std::ostream& out, const matrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_scalar(m(i, j));
        }
        out << '\n';
    }
}

} // namespace sphdec
