#ifndef CDARELAY_CHANNELS_HPP
#define CDARELAY_CHANNELS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cdarelay/error.hpp"
#include "cdarelay/schedule.hpp"

namespace cdarelay {

using Rng = std::mt19937_64;
using cplx = std::complex<double>;

enum class ChannelKind { block_fading, parallel, ofdm, relay_network };

inline const char* to_string(ChannelKind k)
{
    switch (k) {
    case ChannelKind::block_fading:
        return "block-fading";
    case ChannelKind::parallel:
        return "parallel";
    case ChannelKind::ofdm:
        return "ofdm";
    case ChannelKind::relay_network:
        return "relay-network";
    }
    return "?";
}

inline ChannelKind parse_channel_kind(const std::string& s)
{
    for (ChannelKind k : {ChannelKind::block_fading, ChannelKind::parallel, ChannelKind::ofdm, ChannelKind::relay_network})
        if (s == to_string(k))
            return k;
    throw ValidationError("unknown channel kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// fading distributions (all unit mean power)

enum class FadingKind { rayleigh, rician, nakagami };

struct FadingDistribution {
    FadingKind kind = FadingKind::rayleigh;
    double param = 0.0;  // Rician K, or Nakagami m

    static FadingDistribution rayleigh() { return {}; }
    static FadingDistribution rician(double K)
    {
        if (!(K >= 0))
            throw ValidationError("Rician K-factor must be nonnegative");
        return {FadingKind::rician, K};
    }
    static FadingDistribution nakagami(double m)
    {
        if (!(m >= 0.5))
            throw ValidationError("Nakagami m must be at least 1/2");
        return {FadingKind::nakagami, m};
    }

    /// "rayleigh", "rician:<K>", "nakagami:<m>".
    static FadingDistribution parse(const std::string& s)
    {
        if (s == "rayleigh")
            return rayleigh();
        const auto colon = s.find(':');
        if (colon != std::string::npos) {
            const std::string head = s.substr(0, colon);
            double v = 0;
            try {
                v = std::stod(s.substr(colon + 1));
            } catch (const std::exception&) {
                throw ValidationError("bad fading parameter in '" + s + "'");
            }
            if (head == "rician")
                return rician(v);
            if (head == "nakagami")
                return nakagami(v);
        }
        throw ValidationError("unknown fading distribution '" + s + "'");
    }

    std::string to_string() const
    {
        switch (kind) {
        case FadingKind::rayleigh:
            return "rayleigh";
        case FadingKind::rician:
            return "rician:" + format(param);
        case FadingKind::nakagami:
            return "nakagami:" + format(param);
        }
        return "?";
    }

    std::complex<double> draw(Rng& rng) const
    {
        switch (kind) {
        case FadingKind::rayleigh:
            return cn(rng);
        case FadingKind::rician: {
            const double los = std::sqrt(param / (param + 1.0));
            const double scat = std::sqrt(1.0 / (param + 1.0));
            return los + scat * cn(rng);
        }
        case FadingKind::nakagami: {
            std::gamma_distribution<double> g(param, 1.0 / param);
            std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
            const double amp = std::sqrt(g(rng));
            return std::polar(amp, ph(rng));
        }
        }
        return 0.0;
    }

    /// Circularly symmetric complex Gaussian, unit variance.
    static std::complex<double> cn(Rng& rng)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

private:
    static std::string format(double v)
    {
        std::string s = std::to_string(v);
        while (!s.empty() && s.back() == '0')
            s.pop_back();
        if (!s.empty() && s.back() == '.')
            s.pop_back();
        return s;
    }
};

// ---------------------------------------------------------------------------
// realizations

struct ChannelDims {
    int n_r = 1;
    int n_t = 1;
    int B = 1;       // blocks, parallel sub-channels, or OFDM tones Q
    int L_taps = 1;  // OFDM only
    int nodes = 0;   // relay network: N + 1
};

struct FadingRealization {
    ChannelKind kind = ChannelKind::block_fading;
    std::vector<Eigen::MatrixXcd> matrices;  // n_r x n_t per block / tone
    std::vector<std::complex<double>> relay;  // h(m, n), m < n, lexicographic
    int nodes = 0;

    /// Position of h(m, n) (1-based, m < n) in the lexicographic coefficient vector.
    static std::size_t pair_index(int m, int n, int nodes)
    {
        if (m > n)
            std::swap(m, n);
        if (m < 1 || m == n || n > nodes)
            throw ValidationError("invalid link (" + std::to_string(m) + "," + std::to_string(n) + ")");
        std::size_t idx = 0;
        for (int a = 1; a < m; ++a)
            idx += static_cast<std::size_t>(nodes - a);
        return idx + static_cast<std::size_t>(n - m - 1);
    }

    /// Links are reciprocal: h(m, n) = h(n, m).
    std::complex<double> h(int m, int n) const { return relay.at(pair_index(m, n, nodes)); }
    std::complex<double>& h(int m, int n) { return relay.at(pair_index(m, n, nodes)); }

    static FadingRealization relay_network(int nodes)
    {
        if (nodes < 2)
            throw ValidationError("relay network needs at least a source and a destination");
        FadingRealization f;
        f.kind = ChannelKind::relay_network;
        f.nodes = nodes;
        f.relay.assign(static_cast<std::size_t>(nodes) * (nodes - 1) / 2, 0.0);
        return f;
    }
};

inline FadingRealization sample(ChannelKind kind, const ChannelDims& dims, const FadingDistribution& dist, Rng& rng)
{
    FadingRealization f;
    f.kind = kind;
    if (kind == ChannelKind::relay_network) {
        f = FadingRealization::relay_network(dims.nodes);
        for (auto& h : f.relay)
            h = dist.draw(rng);
        return f;
    }
    if (dims.n_r < 1 || dims.n_t < 1 || dims.B < 1)
        throw ValidationError("channel dimensions must be positive");
    auto draw_matrix = [&] {
        Eigen::MatrixXcd H(dims.n_r, dims.n_t);
        for (int i = 0; i < dims.n_r; ++i)
            for (int j = 0; j < dims.n_t; ++j)
                H(i, j) = dist.draw(rng);
        return H;
    };
    if (kind == ChannelKind::ofdm) {
        if (dims.L_taps < 1 || dims.L_taps > dims.B)
            throw ValidationError("OFDM needs 1 <= L_taps <= Q");
        std::vector<Eigen::MatrixXcd> taps;
        for (int tau = 0; tau < dims.L_taps; ++tau)
            taps.push_back(draw_matrix());
        const double scale = 1.0 / std::sqrt(static_cast<double>(dims.L_taps));
        for (int l = 0; l < dims.B; ++l) {
            Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dims.n_r, dims.n_t);
            for (int tau = 0; tau < dims.L_taps; ++tau) {
                const double a = -2.0 * std::numbers::pi * l * tau / dims.B;
                H += std::polar(scale, a) * taps[static_cast<std::size_t>(tau)];
            }
            f.matrices.push_back(std::move(H));
        }
        return f;
    }
    for (int b = 0; b < dims.B; ++b)
        f.matrices.push_back(draw_matrix());
    return f;
}

/// Block-diagonal Lambda_H = diag(H_1, ..., H_B).
inline Eigen::MatrixXcd block_diagonal_channel(const FadingRealization& f)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto& H : f.matrices) {
        rows += H.rows();
        cols += H.cols();
    }
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& H : f.matrices) {
        L.block(r, c, H.rows(), H.cols()) = H;
        r += H.rows();
        c += H.cols();
    }
    return L;
}

// ---------------------------------------------------------------------------
// outage

struct OutageReport {
    double mutual_information = 0;  // bits
    double threshold = 0;           // bits
    bool in_outage = true;
    std::vector<double> alphas;     // ordered by ascending lambda; +inf for zero eigenvalues
};

/// log2 det(I + rho H H^dagger).
inline double log2_det_identity_plus(const Eigen::MatrixXcd& H, double rho)
{
    const Eigen::MatrixXcd G = H.rows() <= H.cols() ? Eigen::MatrixXcd(H * H.adjoint()) : Eigen::MatrixXcd(H.adjoint() * H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    double acc = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        acc += std::log2(1.0 + rho * std::max(0.0, es.eigenvalues()(i)));
    return acc;
}

/// Eigen-exponents of Lambda^dagger Lambda with lambda_i = rho^(-alpha_i).
inline std::vector<double> eigen_exponents(const Eigen::MatrixXcd& Lambda, double rho)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Lambda.adjoint() * Lambda, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double top = ev.size() ? std::max(0.0, ev.maxCoeff()) : 0.0;
    const double tol = 1e-12 * std::max(1.0, top);
    std::vector<double> alphas;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        alphas.push_back(ev(i) <= tol ? std::numeric_limits<double>::infinity() : -std::log(ev(i)) / std::log(rho));
    return alphas;
}

/// Outage with threshold r * rate_blocks * log2(rho); rate_blocks is B for block fading.
inline OutageReport outage(const FadingRealization& f, double r, double rho, int rate_blocks)
{
    if (f.kind == ChannelKind::relay_network)
        throw ValidationError("use destination_outage for relay networks");
    if (!(rho > 1))
        throw ValidationError("outage needs rho > 1");
    if (r < 0)
        throw ValidationError("multiplexing gain r must be nonnegative");
    OutageReport rep;
    for (const auto& H : f.matrices)
        rep.mutual_information += log2_det_identity_plus(H, rho);
    rep.threshold = r * rate_blocks * std::log2(rho);
    rep.in_outage = rep.mutual_information < rep.threshold;
    rep.alphas = eigen_exponents(block_diagonal_channel(f), rho);
    return rep;
}

// ---------------------------------------------------------------------------
// relay-network views

/// Extended vectors h_1(n) .. h_k(n): length N, h(m, n) at m for m in I_j, zero elsewhere.
inline std::vector<Eigen::VectorXcd> relay_channel_view(const FadingRealization& f, const ActivationSchedule& s, int n,
                                                        int k)
{
    if (f.kind != ChannelKind::relay_network)
        throw ValidationError("relay_channel_view needs a relay-network realization");
    if (k > s.blocks())
        throw ValidationError("schedule has " + std::to_string(s.blocks()) + " blocks, view asked for " +
                              std::to_string(k));
    if (n < 1 || n > f.nodes)
        throw ValidationError("node index out of range");
    const int N = f.nodes - 1;
    std::vector<Eigen::VectorXcd> out;
    for (int j = 1; j <= k; ++j) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N);
        for (int m : s.sets[static_cast<std::size_t>(j - 1)])
            if (m != n)
                v(m - 1) = f.h(m, n);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace cdarelay

#endif // CDARELAY_CHANNELS_HPP
