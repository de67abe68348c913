#ifndef CDARELAY_DECODE_HPP
#define CDARELAY_DECODE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cdarelay/channels.hpp"
#include "cdarelay/error.hpp"
#include "cdarelay/stcode.hpp"

namespace cdarelay {

/// out[0..T) += theta * gain * row `row` of block b of codeword c.
/// Every noiseless received signal in the library is built from this one routine.
inline void accumulate_row_signal(const CodebookTable& table, std::uint64_t c, int b, int row, cplx gain, double theta,
                                  cplx* out)
{
    const int T = table.T();
    const cplx* x = table.block(c, b) + row * T;
    const cplx g = theta * gain;
    for (int k = 0; k < T; ++k)
        out[k] += g * x[k];
}

/// out (n_r x T, row-major) += theta * G * block b of codeword c, rows of G in order.
inline void accumulate_block_signal(const CodebookTable& table, std::uint64_t c, int b, const Eigen::MatrixXcd& G,
                                    double theta, cplx* out)
{
    const int T = table.T();
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index n = 0; n < G.cols(); ++n)
            if (G(i, n) != cplx(0.0, 0.0))
                accumulate_row_signal(table, c, b, static_cast<int>(n), G(i, n), theta, out + i * T);
}

/// Noiseless received signals of every codeword through per-block gains G_b (n_r x n_t).
class EffectiveChannel {
public:
    EffectiveChannel(const CodebookTable& table, std::vector<Eigen::MatrixXcd> gains, double theta)
        : table_(&table), gains_(std::move(gains)), theta_(theta)
    {
        if (gains_.empty() || static_cast<int>(gains_.size()) > table.B())
            throw ValidationError("effective channel needs between 1 and B blocks of gains");
        n_r_ = static_cast<int>(gains_[0].rows());
        for (const auto& G : gains_)
            if (G.rows() != n_r_ || G.cols() != table.n_t())
                throw ValidationError("gain matrix shape does not match the codebook rows");
        dim_ = gains_.size() * static_cast<std::size_t>(n_r_ * table.T());
        signals_.assign(table.size() * dim_, cplx(0.0, 0.0));
        const std::size_t per_block = static_cast<std::size_t>(n_r_ * table.T());
        for (std::uint64_t c = 0; c < table.size(); ++c)
            for (std::size_t b = 0; b < gains_.size(); ++b)
                accumulate_block_signal(table, c, static_cast<int>(b), gains_[b], theta_,
                                        &signals_[c * dim_ + b * per_block]);
    }

    std::uint64_t size() const { return table_->size(); }
    std::size_t dim() const { return dim_; }
    int n_r() const { return n_r_; }
    int blocks() const { return static_cast<int>(gains_.size()); }
    double theta() const { return theta_; }
    const std::vector<Eigen::MatrixXcd>& gains() const { return gains_; }
    std::span<const cplx> signal(std::uint64_t c) const { return {&signals_[c * dim_], dim_}; }

    /// Raw Lambda_H = diag(G_1, ..., G_b).
    Eigen::MatrixXcd lambda() const
    {
        const Eigen::Index r = n_r_, c = table_->n_t();
        const auto nb = static_cast<Eigen::Index>(gains_.size());
        Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(nb * r, nb * c);
        for (Eigen::Index b = 0; b < nb; ++b)
            L.block(b * r, b * c, r, c) = gains_[static_cast<std::size_t>(b)];
        return L;
    }

private:
    const CodebookTable* table_;
    std::vector<Eigen::MatrixXcd> gains_;
    double theta_;
    int n_r_ = 1;
    std::size_t dim_ = 0;
    std::vector<cplx> signals_;
};

/// argmin_c |y - s_c|^2; ties go to the lowest index.
inline std::uint64_t ml_decode(std::span<const cplx> received, const EffectiveChannel& eff)
{
    if (received.size() != eff.dim())
        throw ValidationError("received vector has length " + std::to_string(received.size()) + ", expected " +
                              std::to_string(eff.dim()));
    if (eff.size() == 0)
        throw ValidationError("cannot decode over an empty codebook");
    std::uint64_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const std::size_t n = eff.dim();
    for (std::uint64_t c = 0; c < eff.size(); ++c) {
        const cplx* s = eff.signal(c).data();
        double d = 0;
        for (std::size_t k = 0; k < n && d < best_d; ++k)
            d += std::norm(received[k] - s[k]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// analysis quantities

/// theta^2 |Lambda_H (S1 - S2)|_F^2.
inline double pairwise_distance_sq(const Eigen::MatrixXcd& S1, const Eigen::MatrixXcd& S2, const Eigen::MatrixXcd& Lambda,
                                   double theta)
{
    if (S1.rows() != S2.rows() || S1.cols() != S2.cols())
        throw ValidationError("codeword shapes differ");
    if (Lambda.cols() != S1.rows())
        throw ValidationError("channel and codeword shapes do not compose");
    return theta * theta * (Lambda * (S1 - S2)).squaredNorm();
}

/// Hermitian eigenvalues of A A^dagger, descending.
inline std::vector<double> gram_eigenvalues_desc(const Eigen::MatrixXcd& A)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A * A.adjoint(), Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::reverse(v.begin(), v.end());
    return v;
}

/// Hermitian eigenvalues of A^dagger A, ascending.
inline std::vector<double> channel_eigenvalues_asc(const Eigen::MatrixXcd& Lambda)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Lambda.adjoint() * Lambda, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

/// theta^2 sum_i lambda_i mu_i with lambda ascending and mu descending.
inline double mismatched_bound(std::span<const double> lambda_asc, std::span<const double> mu_desc, double theta)
{
    if (lambda_asc.size() != mu_desc.size())
        throw ValidationError("eigenvalue lists must have the same length");
    double acc = 0;
    for (std::size_t i = 0; i < lambda_asc.size(); ++i) {
        if (lambda_asc[i] < -1e-9 || mu_desc[i] < -1e-9)
            throw ValidationError("negative eigenvalue beyond tolerance");
        acc += std::max(0.0, lambda_asc[i]) * std::max(0.0, mu_desc[i]);
    }
    return theta * theta * acc;
}

/// delta_J = sum_{i=q-J}^{q} (1 - alpha_i) - r B, alphas indexed 1..q by ascending lambda.
inline double delta_J(std::span<const double> alphas, int J, double r, int B)
{
    const int q = static_cast<int>(alphas.size());
    if (J < 0 || J > q - 1)
        throw ValidationError("J must lie in [0, q-1]");
    double acc = 0;
    for (int i = q - J; i <= q; ++i) {
        const double a = alphas[static_cast<std::size_t>(i - 1)];
        if (!std::isfinite(a))
            throw ValidationError("delta_J needs finite alphas in the summed range");
        acc += 1.0 - a;
    }
    return acc - r * B;
}

/// The J used by the no-outage argument: (number of alpha_i < 1) - 1.
inline int designated_J(std::span<const double> alphas)
{
    int count = 0;
    for (double a : alphas)
        if (a < 1.0)
            ++count;
    return count - 1;
}

/// k-th smallest mu >= k-th smallest nu for every k, both given descending.
inline bool interlacing_holds(std::span<const double> mu_desc, std::span<const double> nu_desc, double rel_tol = 1e-9)
{
    if (mu_desc.size() > nu_desc.size())
        throw ValidationError("row-deleted spectrum longer than the full one");
    const std::size_t p = mu_desc.size(), n = nu_desc.size();
    double scale = 0;
    for (double v : nu_desc)
        scale = std::max(scale, std::abs(v));
    for (std::size_t k = 1; k <= p; ++k)
        if (mu_desc[p - k] < nu_desc[n - k] - rel_tol * std::max(1.0, scale))
            return false;
    return true;
}

/// Inclusion principle on Delta S (row-deleted) against Delta S-hat (full).
inline bool inclusion_check(const Eigen::MatrixXcd& dS, const Eigen::MatrixXcd& dS_full, double rel_tol = 1e-9)
{
    if (dS.cols() != dS_full.cols() || dS.rows() > dS_full.rows())
        throw ValidationError("row-deleted and full differences have incompatible shapes");
    const auto mu = gram_eigenvalues_desc(dS);
    const auto nu = gram_eigenvalues_desc(dS_full);
    return interlacing_holds(mu, nu, rel_tol);
}

// ---------------------------------------------------------------------------
// two-row (Alamouti) DDF distances

/// Embedded phi^i(|dl0|^2 + |dl1|^2), i < count, computed exactly in K before embedding.
inline std::vector<double> conjugate_energies(const Tower& t, std::span<const GaussInt> delta, int count)
{
    if (t.T() != 2)
        throw ValidationError("conjugate energies are defined for T = 2 towers");
    const auto ell = message_elements(t, delta);
    const FieldElement e = ell[0] * t.apply_sigma(ell[0]) + ell[1] * t.apply_sigma(ell[1]);
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(static_cast<double>(t.embed_ld(t.apply_phi(e, i)).real()));
    return out;
}

/// Relay-side lower bound after listening to k blocks: |h|^2 theta^2 k (prod_{i<k} e_i)^(1/k).
inline double broadcast_bound(cplx h_sr, double theta, std::span<const double> energies, int k)
{
    if (k < 1 || static_cast<std::size_t>(k) > energies.size())
        throw ValidationError("broadcast bound needs 1 <= k <= available conjugates");
    double log_prod = 0;
    for (int i = 0; i < k; ++i) {
        if (energies[static_cast<std::size_t>(i)] <= 0)
            return 0.0;
        log_prod += std::log(energies[static_cast<std::size_t>(i)]);
    }
    return std::norm(h_sr) * theta * theta * k * std::exp(log_prod / k);
}

/// Destination distance when the relay joins at 0-based block b0 and decoded correctly.
inline double cooperation_distance(cplx h_sd, cplx h_rd, double theta, std::span<const double> energies, int b0)
{
    if (b0 < 0 || static_cast<std::size_t>(b0) > energies.size())
        throw ValidationError("relay start block out of range");
    double before = 0, after = 0;
    for (std::size_t i = 0; i < energies.size(); ++i)
        (static_cast<int>(i) < b0 ? before : after) += energies[i];
    return theta * theta * (std::norm(h_sd) * before + (std::norm(h_sd) + std::norm(h_rd)) * after);
}

/// |s_a - s_b|^2 between two rows of an effective channel.
inline double signal_distance_sq(const EffectiveChannel& eff, std::uint64_t a, std::uint64_t b)
{
    const auto sa = eff.signal(a), sb = eff.signal(b);
    double d = 0;
    for (std::size_t k = 0; k < sa.size(); ++k)
        d += std::norm(sa[k] - sb[k]);
    return d;
}

} // namespace cdarelay

#endif // CDARELAY_DECODE_HPP
