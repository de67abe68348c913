#ifndef CDARELAY_RATIONAL_HPP
#define CDARELAY_RATIONAL_HPP

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cdarelay/error.hpp"

namespace cdarelay {

using Rational = mpq_class;
using Integer = mpz_class;

/// Always "p/q", including q = 1, so serialized documents have one shape.
inline std::string to_fraction_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(const std::string& s)
{
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw ValidationError("invalid rational literal '" + s + "'");
    if (q.get_den() == 0)
        throw ValidationError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline long double to_long_double(const Rational& q)
{
    const auto& num = q.get_num();
    const auto& den = q.get_den();
    if (num.fits_slong_p() && den.fits_slong_p())
        return static_cast<long double>(num.get_si()) / static_cast<long double>(den.get_si());
    return static_cast<long double>(q.get_d());
}

/// Gaussian integer a + ib with machine-word parts; QAM points live here.
struct GaussInt {
    long re = 0;
    long im = 0;

    friend bool operator==(const GaussInt&, const GaussInt&) = default;
    GaussInt operator-(const GaussInt& o) const { return {re - o.re, im - o.im}; }
    GaussInt operator+(const GaussInt& o) const { return {re + o.re, im + o.im}; }
    GaussInt operator-() const { return {-re, -im}; }
    long norm() const { return re * re + im * im; }
};

/// Dense square-or-rectangular matrix of exact rationals, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RationalMatrix identity(std::size_t n)
    {
        RationalMatrix out(n, n);
        for (std::size_t i = 0; i < n; ++i)
            out(i, i) = 1;
        return out;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    RationalMatrix operator*(const RationalMatrix& o) const
    {
        if (cols_ != o.rows_)
            throw ValidationError("matrix product shape mismatch");
        RationalMatrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rational& a = (*this)(i, k);
                if (a == 0)
                    continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    if (o(k, j) != 0)
                        out(i, j) += a * o(k, j);
            }
        return out;
    }

    std::vector<Rational> apply(const std::vector<Rational>& v) const
    {
        if (v.size() != cols_)
            throw ValidationError("matrix-vector shape mismatch");
        std::vector<Rational> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k)
                if (v[k] != 0 && (*this)(i, k) != 0)
                    out[i] += (*this)(i, k) * v[k];
        return out;
    }

    RationalMatrix pow(unsigned e) const
    {
        RationalMatrix result = identity(rows_);
        RationalMatrix base = *this;
        while (e) {
            if (e & 1u)
                result = result * base;
            e >>= 1u;
            if (e)
                base = base * base;
        }
        return result;
    }

    bool is_identity() const { return rows_ == cols_ && *this == identity(rows_); }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    /// Exact determinant by fraction elimination; square matrices only.
    Rational determinant() const
    {
        if (rows_ != cols_)
            throw ValidationError("determinant of non-square matrix");
        RationalMatrix a = *this;
        Rational det = 1;
        const std::size_t n = rows_;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && a(pivot, col) == 0)
                ++pivot;
            if (pivot == n)
                return 0;
            if (pivot != col) {
                for (std::size_t j = 0; j < n; ++j)
                    std::swap(a(pivot, j), a(col, j));
                det = -det;
            }
            det *= a(col, col);
            for (std::size_t r = col + 1; r < n; ++r) {
                if (a(r, col) == 0)
                    continue;
                Rational f = a(r, col) / a(col, col);
                for (std::size_t j = col; j < n; ++j)
                    a(r, j) -= f * a(col, j);
            }
        }
        return det;
    }

    /// Solves A x = b exactly; throws if A is singular.
    std::vector<Rational> solve(std::vector<Rational> b) const
    {
        if (rows_ != cols_ || b.size() != rows_)
            throw ValidationError("solve shape mismatch");
        RationalMatrix a = *this;
        const std::size_t n = rows_;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && a(pivot, col) == 0)
                ++pivot;
            if (pivot == n)
                throw DomainError("singular matrix");
            if (pivot != col) {
                for (std::size_t j = 0; j < n; ++j)
                    std::swap(a(pivot, j), a(col, j));
                std::swap(b[pivot], b[col]);
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col || a(r, col) == 0)
                    continue;
                Rational f = a(r, col) / a(col, col);
                for (std::size_t j = col; j < n; ++j)
                    a(r, j) -= f * a(col, j);
                b[r] -= f * b[col];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            b[i] /= a(i, i);
        return b;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

} // namespace cdarelay

#endif // CDARELAY_RATIONAL_HPP
