#ifndef CDARELAY_TESTS_ORACLES_HPP
#define CDARELAY_TESTS_ORACLES_HPP

// Test-only reference computations. Nothing here calls the code paths
// it is used to check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <cstdint>
#include <limits>

#include "cdarelay/rational.hpp"

namespace oracle {

using cdarelay::Rational;

struct GaussRational {
    Rational re, im;

    GaussRational operator+(const GaussRational& o) const { return {re + o.re, im + o.im}; }
    GaussRational operator-(const GaussRational& o) const { return {re - o.re, im - o.im}; }
    GaussRational operator*(const GaussRational& o) const
    {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussRational operator/(const GaussRational& o) const
    {
        Rational d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    bool is_zero() const { return re == 0 && im == 0; }
};

/// Determinant over Q(i) by plain Gaussian elimination.
inline GaussRational determinant(std::vector<std::vector<GaussRational>> a)
{
    const std::size_t n = a.size();
    GaussRational det{1, 0};
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c].is_zero())
            ++p;
        if (p == n)
            return {0, 0};
        if (p != c) {
            std::swap(a[p], a[c]);
            det = det * GaussRational{-1, 0};
        }
        det = det * a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            GaussRational f = a[r][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j)
                a[r][j] = a[r][j] - f * a[c][j];
        }
    }
    return det;
}

/// Rayleigh SISO outage probability Pr(log2(1 + rho|h|^2) < r log2 rho), |h|^2 ~ Exp(1).
inline double rayleigh_siso_outage(double rho, double r)
{
    return 1.0 - std::exp(-(std::pow(rho, r) - 1.0) / rho);
}

/// Argmin by literal matrix algebra: encode, assemble block-diagonally, multiply by Lambda_H.
inline std::uint64_t brute_force_decode(const std::vector<Eigen::MatrixXcd>& S_all, const Eigen::MatrixXcd& Lambda,
                                        const std::vector<Eigen::MatrixXcd>& Y, int n_r, int T)
{
    std::uint64_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint64_t c = 0; c < S_all.size(); ++c) {
        const Eigen::MatrixXcd R = Lambda * S_all[c];
        double d = 0;
        for (std::size_t b = 0; b < Y.size(); ++b)
            d += (Y[b] - R.block(static_cast<Eigen::Index>(b) * n_r, static_cast<Eigen::Index>(b) * T, n_r, T))
                     .squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace oracle

#endif // CDARELAY_TESTS_ORACLES_HPP
