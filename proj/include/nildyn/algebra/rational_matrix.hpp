#pragma once

#include "nildyn/algebra/rational.hpp"
#include "nildyn/errors.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace nildyn {

using RationalVector = std::vector<Rational>;

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RationalMatrix from_rows(const std::vector<RationalVector>& rows) {
        if (rows.empty()) return {};
        RationalMatrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_)
                throw DimensionMismatch("ragged matrix: row " + std::to_string(r) + " has " +
                                        std::to_string(rows[r].size()) + " entries, expected " +
                                        std::to_string(m.cols_));
            for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[index(r, c)]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[index(r, c)]; }

    RationalVector multiply(const RationalVector& v) const {
        if (v.size() != cols_)
            throw DimensionMismatch("matrix-vector product: vector length " + std::to_string(v.size()) +
                                    " != cols " + std::to_string(cols_));
        RationalVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
        return out;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }

private:
    std::size_t index(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_)
            throw std::out_of_range("RationalMatrix index (" + std::to_string(r) + "," + std::to_string(c) +
                                    ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
        return r * cols_ + c;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// Reduced row echelon form in place; returns the pivot column of each pivot row.
inline std::vector<std::size_t> reduce_to_rref(RationalMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t sel = row;
        while (sel < m.rows() && m(sel, col) == 0) ++sel;
        if (sel == m.rows()) continue;
        m.swap_rows(row, sel);
        Rational inv = 1 / m(row, col);
        for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col) == 0) continue;
            Rational f = m(r, col);
            for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

/// Scales v to a primitive integer vector whose first nonzero entry is positive.
inline RationalVector primitive_integer_vector(RationalVector v) {
    BigInt lcm_den = 1;
    for (const auto& q : v) lcm_den = boost::multiprecision::lcm(lcm_den, BigInt(denominator(q)));
    BigInt g = 0;
    for (auto& q : v) {
        q *= Rational(lcm_den);
        g = boost::multiprecision::gcd(g, BigInt(numerator(q)));
    }
    if (g == 0) return v;
    Rational sign = 1;
    for (const auto& q : v)
        if (q != 0) {
            sign = q < 0 ? -1 : 1;
            break;
        }
    for (auto& q : v) q = q * sign / Rational(g);
    return v;
}

/// Basis of {v : M v = 0} over Q, one primitive integer vector per free column.
/// Empty iff the kernel is trivial.
inline std::vector<RationalVector> rational_kernel(const RationalMatrix& m) {
    if (m.empty()) throw DimensionMismatch("rational_kernel: matrix must be nonempty");
    RationalMatrix r = m;
    auto pivots = reduce_to_rref(r);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;

    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(m.cols());
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r(i, free);
        basis.push_back(primitive_integer_vector(std::move(v)));
    }
    return basis;
}

} // namespace nildyn
