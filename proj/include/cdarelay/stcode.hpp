#ifndef CDARELAY_STCODE_HPP
#define CDARELAY_STCODE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdarelay/error.hpp"
#include "cdarelay/fieldtower.hpp"
#include "cdarelay/rational.hpp"
#include "cdarelay/schedule.hpp"

namespace cdarelay {

// ---------------------------------------------------------------------------
// QAM

/// Odd-integer square QAM: a + ib with a, b odd and |a|, |b| <= M - 1.
struct QamConstellation {
    int M = 2;
    std::vector<GaussInt> points;  // real part major, both ascending

    std::size_t size() const { return points.size(); }

    bool contains(GaussInt z) const
    {
        auto ok = [this](long v) { return (v % 2 != 0) && std::abs(v) <= M - 1; };
        return ok(z.re) && ok(z.im);
    }

    std::size_t index_of(GaussInt z) const
    {
        if (!contains(z))
            throw ValidationError("symbol " + std::to_string(z.re) + "+" + std::to_string(z.im) +
                                  "i is not in the M=" + std::to_string(M) + " constellation");
        const long a = (z.re + M - 1) / 2;
        const long b = (z.im + M - 1) / 2;
        return static_cast<std::size_t>(a * M + b);
    }
};

inline QamConstellation qam(int M)
{
    if (M < 2 || M % 2 != 0)
        throw ValidationError("QAM side M must be a positive even integer, got " + std::to_string(M));
    QamConstellation q;
    q.M = M;
    q.points.reserve(static_cast<std::size_t>(M) * M);
    for (long a = -(M - 1); a <= M - 1; a += 2)
        for (long b = -(M - 1); b <= M - 1; b += 2)
            q.points.push_back({a, b});
    return q;
}

/// Minimum |p - q|^2 over distinct pairs, by exhaustion.
inline long min_squared_distance(const QamConstellation& q)
{
    long best = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            if (i != j)
                best = std::min(best, (q.points[i] - q.points[j]).norm());
    return best;
}

// ---------------------------------------------------------------------------
// parameters

/// "auto" picks the smallest even M reaching the rate; "fixed:M" pins it.
struct MPolicy {
    bool fixed = false;
    int M = 2;

    static MPolicy parse(const std::string& s)
    {
        if (s == "auto")
            return {};
        if (s.rfind("fixed:", 0) == 0) {
            int M = 0;
            try {
                M = std::stoi(s.substr(6));
            } catch (const std::exception&) {
                throw ValidationError("bad M-policy '" + s + "'");
            }
            qam(M);
            return {true, M};
        }
        throw ValidationError("M-policy must be 'auto' or 'fixed:<M>', got '" + s + "'");
    }

    std::string to_string() const { return fixed ? "fixed:" + std::to_string(M) : "auto"; }
};

struct CodeParams {
    int n_t = 2;
    int T = 2;
    int B = 1;
    int m = 1;
    double r = 0.0;
    double rho = 1.0;
    double theta = 1.0;
    int M = 2;
    int rate_blocks = 1;  // blocks the rate r is counted over (B for block fading / DDF, 1 for parallel)
};

/// Number of QAM symbols per codeword: T * [L : Q(i)].
inline std::size_t symbol_count(const Tower& t) { return static_cast<std::size_t>(t.T()) * t.gaussian_degree(); }

/// Rate exponent e with M^2 = rho^e and theta^2 = rho^(1 - e).
inline double rate_exponent(const Tower& t, double r, int rate_blocks)
{
    return r * rate_blocks * t.T() / static_cast<double>(symbol_count(t));
}

inline CodeParams make_code_params(const Tower& t, int n_t, int B, double r, double rho, const MPolicy& policy,
                                   int rate_blocks)
{
    if (n_t < 1 || n_t > t.T())
        throw ValidationError("need 1 <= n_t <= T, got n_t=" + std::to_string(n_t) + " T=" + std::to_string(t.T()));
    if (B < 1 || B > t.m())
        throw ValidationError("need 1 <= B <= m, got B=" + std::to_string(B) + " m=" + std::to_string(t.m()));
    if (r < 0)
        throw ValidationError("multiplexing gain r must be nonnegative");
    if (!(rho > 0))
        throw ValidationError("SNR rho must be positive");
    CodeParams p;
    p.n_t = n_t;
    p.T = t.T();
    p.B = B;
    p.m = t.m();
    p.r = r;
    p.rho = rho;
    p.rate_blocks = rate_blocks;
    const double e = rate_exponent(t, r, rate_blocks);
    p.theta = std::sqrt(std::pow(rho, 1.0 - e));
    if (policy.fixed) {
        p.M = policy.M;
    } else {
        const double target = std::pow(rho, e);
        int M = 2;
        while (static_cast<double>(M) * M < target * (1 - 1e-12))
            M += 2;
        p.M = M;
    }
    return p;
}

// ---------------------------------------------------------------------------
// codewords

using ExactMatrix = std::vector<std::vector<FieldElement>>;

struct CodewordX {
    std::vector<GaussInt> coeffs;  // l_{i,j} at i*d + j, d = [L : Q(i)]
    std::vector<FieldElement> ell;
    ExactMatrix exact;               // full T x T
    Eigen::MatrixXcd entries;        // first n_t rows, embedded, unscaled
};

/// l_i = sum_j q_{i,j} beta_j over the message basis.
inline std::vector<FieldElement> message_elements(const Tower& t, std::span<const GaussInt> coeffs)
{
    const auto& basis = t.message_basis();
    const std::size_t d = basis.size();
    if (coeffs.size() != symbol_count(t))
        throw ValidationError("expected " + std::to_string(symbol_count(t)) + " symbols, got " +
                              std::to_string(coeffs.size()));
    const std::size_t ii = t.imaginary_index();
    std::vector<FieldElement> ell;
    for (int i = 0; i < t.T(); ++i) {
        std::vector<Rational> c(t.degree());
        for (std::size_t j = 0; j < d; ++j) {
            const GaussInt q = coeffs[static_cast<std::size_t>(i) * d + j];
            c[basis[j]] += q.re;
            c[basis[j] + ii] += q.im;
        }
        ell.push_back(FieldElement(t.zero().tower(), std::move(c)));
    }
    return ell;
}

/// Left regular representation of sum_i z^i l_i with the gamma twist above the diagonal.
inline ExactMatrix regular_representation(const Tower& t, const std::vector<FieldElement>& ell)
{
    const int T = t.T();
    const FieldElement g = t.gamma();
    ExactMatrix X(static_cast<std::size_t>(T));
    for (int r = 0; r < T; ++r)
        for (int c = 0; c < T; ++c) {
            if (r >= c)
                X[r].push_back(t.apply_sigma(ell[static_cast<std::size_t>(r - c)], c));
            else
                X[r].push_back(g * t.apply_sigma(ell[static_cast<std::size_t>(T + r - c)], c));
        }
    return X;
}

inline ExactMatrix apply_phi(const Tower& t, const ExactMatrix& X, int power)
{
    ExactMatrix out = X;
    for (auto& row : out)
        for (auto& x : row)
            x = t.apply_phi(x, power);
    return out;
}

inline FieldElement exact_determinant(const ExactMatrix& X)
{
    const std::size_t n = X.size();
    if (n == 1)
        return X[0][0];
    FieldElement acc = X[0][0].tower()->zero();
    for (std::size_t c = 0; c < n; ++c) {
        if (X[0][c].is_zero())
            continue;
        ExactMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<FieldElement> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c)
                    row.push_back(X[r][k]);
            minor.push_back(std::move(row));
        }
        FieldElement term = X[0][c] * exact_determinant(minor);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

inline Eigen::MatrixXcd embed_rows(const Tower& t, const ExactMatrix& X, int rows)
{
    const int T = static_cast<int>(X.size());
    Eigen::MatrixXcd out(rows, T);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < T; ++c)
            out(r, c) = t.embed(X[r][c]);
    return out;
}

inline CodewordX encode_x(std::vector<GaussInt> coeffs, const CodeParams& params, const Tower& t)
{
    if (params.T != t.T() || params.m != t.m())
        throw ValidationError("code parameters (T=" + std::to_string(params.T) + ", m=" + std::to_string(params.m) +
                              ") do not match tower " + t.id());
    const QamConstellation q = qam(params.M);
    for (const auto& z : coeffs)
        if (!q.contains(z))
            throw ValidationError("coefficient " + std::to_string(z.re) + "+" + std::to_string(z.im) +
                                  "i outside the constellation");
    CodewordX x;
    x.ell = message_elements(t, coeffs);
    x.coeffs = std::move(coeffs);
    x.exact = regular_representation(t, x.ell);
    x.entries = embed_rows(t, x.exact, params.n_t);
    return x;
}

/// Embedded first n_t rows of phi^b applied to the exact form.
inline Eigen::MatrixXcd conjugate_block(const Tower& t, const CodewordX& x, int b, int n_t)
{
    return embed_rows(t, apply_phi(t, x.exact, b), n_t);
}

// ---------------------------------------------------------------------------
// assembly

enum class Layout { block_diagonal, stacked, ddf_patterned, alamouti_ddf };

inline const char* to_string(Layout l)
{
    switch (l) {
    case Layout::block_diagonal:
        return "block-diagonal";
    case Layout::stacked:
        return "stacked";
    case Layout::ddf_patterned:
        return "ddf-patterned";
    case Layout::alamouti_ddf:
        return "alamouti-ddf";
    }
    return "?";
}

inline Layout parse_layout(const std::string& s)
{
    for (Layout l : {Layout::block_diagonal, Layout::stacked, Layout::ddf_patterned, Layout::alamouti_ddf})
        if (s == to_string(l))
            return l;
    throw ValidationError("unknown layout '" + s + "'");
}

struct AssembledCodeword {
    Layout layout = Layout::block_diagonal;
    std::vector<Eigen::MatrixXcd> blocks;  // theta * phi^b(X), inactive rows zeroed
    std::optional<ActivationSchedule> pattern;

    Eigen::MatrixXcd matrix() const
    {
        if (blocks.empty())
            return {};
        const Eigen::Index r = blocks[0].rows(), c = blocks[0].cols();
        const auto nb = static_cast<Eigen::Index>(blocks.size());
        if (layout == Layout::stacked) {
            Eigen::MatrixXcd out(nb * r, c);
            for (Eigen::Index b = 0; b < nb; ++b)
                out.block(b * r, 0, r, c) = blocks[static_cast<std::size_t>(b)];
            return out;
        }
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nb * r, nb * c);
        for (Eigen::Index b = 0; b < nb; ++b)
            out.block(b * r, b * c, r, c) = blocks[static_cast<std::size_t>(b)];
        return out;
    }
};

inline AssembledCodeword assemble(const Tower& t, const CodewordX& x, Layout layout, const CodeParams& params,
                                  const ActivationSchedule* schedule = nullptr)
{
    AssembledCodeword out;
    out.layout = layout;
    const bool patterned = layout == Layout::ddf_patterned || layout == Layout::alamouti_ddf;
    if (layout == Layout::alamouti_ddf) {
        if (t.T() != 2 || t.base() != BaseField::rationals || params.n_t != 2)
            throw ValidationError("alamouti-ddf layout needs the two-row tower over Q with T = 2");
    }
    if (patterned) {
        if (!schedule)
            throw ValidationError(std::string(to_string(layout)) + " layout needs an activation schedule");
        if (schedule->blocks() != params.B)
            throw ValidationError("schedule has " + std::to_string(schedule->blocks()) + " blocks, expected " +
                                  std::to_string(params.B));
        schedule->validate(params.n_t);
        out.pattern = *schedule;
    }
    for (int b = 0; b < params.B; ++b) {
        Eigen::MatrixXcd blk = params.theta * conjugate_block(t, x, b, params.n_t);
        if (patterned)
            for (int n = 1; n <= params.n_t; ++n)
                if (!schedule->active(n, b + 1))
                    blk.row(n - 1).setZero();
        out.blocks.push_back(std::move(blk));
    }
    return out;
}

// ---------------------------------------------------------------------------
// codebook

/// Finite codebook over a tower; optional restriction lets only the listed symbols vary
/// (the others stay at the first constellation point).
class Codebook {
public:
    Codebook(TowerPtr tower, int M, int n_t, std::optional<std::vector<std::size_t>> free_symbols = std::nullopt)
        : tower_(std::move(tower)), qam_(qam(M)), n_t_(n_t)
    {
        const std::size_t S = symbol_count(*tower_);
        if (free_symbols) {
            for (auto s : *free_symbols)
                if (s >= S)
                    throw ValidationError("restricted symbol index " + std::to_string(s) + " out of range");
            free_ = *free_symbols;
            restricted_ = true;
        } else {
            for (std::size_t s = 0; s < S; ++s)
                free_.push_back(s);
        }
        size_log2_ = static_cast<double>(free_.size()) * std::log2(static_cast<double>(qam_.size()));
    }

    const TowerPtr& tower() const { return tower_; }
    const QamConstellation& constellation() const { return qam_; }
    int M() const { return qam_.M; }
    int n_t() const { return n_t_; }
    bool restricted() const { return restricted_; }
    std::size_t symbols() const { return symbol_count(*tower_); }
    double size_log2() const { return size_log2_; }
    const std::vector<std::size_t>& free_symbols() const { return free_; }

    std::uint64_t size() const
    {
        if (size_log2_ > 62)
            throw ResourceGuardError("codebook of 2^" + std::to_string(size_log2_) + " codewords is not indexable");
        std::uint64_t n = 1;
        for (std::size_t k = 0; k < free_.size(); ++k)
            n *= qam_.size();
        return n;
    }

    /// Symbol digits with the first free symbol least significant.
    std::vector<GaussInt> message(std::uint64_t index) const
    {
        std::vector<GaussInt> msg(symbols(), qam_.points[0]);
        const std::uint64_t q = qam_.size();
        for (auto s : free_) {
            msg[s] = qam_.points[index % q];
            index /= q;
        }
        if (index != 0)
            throw ValidationError("codeword index out of range");
        return msg;
    }

    std::uint64_t index_of(const std::vector<GaussInt>& msg) const
    {
        if (msg.size() != symbols())
            throw ValidationError("message has wrong symbol count");
        std::uint64_t idx = 0;
        const std::uint64_t q = qam_.size();
        for (std::size_t k = free_.size(); k-- > 0;)
            idx = idx * q + qam_.index_of(msg[free_[k]]);
        for (std::size_t s = 0; s < msg.size(); ++s)
            if (std::find(free_.begin(), free_.end(), s) == free_.end() && !(msg[s] == qam_.points[0]))
                throw ValidationError("message varies a fixed symbol of a restricted codebook");
        return idx;
    }

    CodeParams params(int B = 1) const
    {
        CodeParams p;
        p.n_t = n_t_;
        p.T = tower_->T();
        p.m = tower_->m();
        p.B = B;
        p.M = qam_.M;
        return p;
    }

    CodewordX codeword(std::uint64_t index) const { return encode_x(message(index), params(), *tower_); }

    void guard(std::uint64_t limit) const
    {
        if (size_log2_ > 62 || size() > limit)
            throw ResourceGuardError("codebook has 2^" + std::to_string(size_log2_) + " codewords, above the limit of " +
                                     std::to_string(limit) + "; use a smaller M or tower, or restrict the symbols");
    }

private:
    TowerPtr tower_;
    QamConstellation qam_;
    int n_t_;
    std::vector<std::size_t> free_;
    bool restricted_ = false;
    double size_log2_ = 0;
};

inline std::vector<CodewordX> enumerate_codebook(const Codebook& book, std::uint64_t limit)
{
    book.guard(limit);
    std::vector<CodewordX> out;
    out.reserve(book.size());
    for (std::uint64_t i = 0; i < book.size(); ++i)
        out.push_back(book.codeword(i));
    return out;
}

// ---------------------------------------------------------------------------
// embedded transmit table

/// Unscaled embedded first n_t rows of phi^b(X) for every codeword and block, row-major.
/// Built by superposition: X is real-linear in the symbol parts.
class CodebookTable {
public:
    CodebookTable(const Codebook& book, int B, std::uint64_t limit) : n_t_(book.n_t()), T_(book.tower()->T()), B_(B)
    {
        book.guard(limit);
        const Tower& t = *book.tower();
        const std::size_t S = book.symbols();
        const std::size_t per = static_cast<std::size_t>(n_t_ * T_);
        // gen_[(b * S + s) * 2 + part]
        std::vector<std::vector<std::complex<double>>> gen(static_cast<std::size_t>(B) * S * 2);
        for (std::size_t s = 0; s < S; ++s)
            for (int part = 0; part < 2; ++part) {
                std::vector<GaussInt> unit(S);
                unit[s] = part == 0 ? GaussInt{1, 0} : GaussInt{0, 1};
                const ExactMatrix X = regular_representation(t, message_elements(t, unit));
                for (int b = 0; b < B; ++b) {
                    const ExactMatrix Xb = apply_phi(t, X, b);
                    auto& g = gen[(static_cast<std::size_t>(b) * S + s) * 2 + static_cast<std::size_t>(part)];
                    g.resize(per);
                    for (int r = 0; r < n_t_; ++r)
                        for (int c = 0; c < T_; ++c) {
                            auto z = t.embed_ld(Xb[r][c]);
                            g[static_cast<std::size_t>(r * T_ + c)] = {static_cast<double>(z.real()),
                                                                       static_cast<double>(z.imag())};
                        }
                }
            }
        size_ = book.size();
        data_.assign(size_ * static_cast<std::size_t>(B) * per, {0.0, 0.0});
        for (std::uint64_t c = 0; c < size_; ++c) {
            const auto msg = book.message(c);
            for (int b = 0; b < B; ++b) {
                std::complex<double>* dst = &data_[(c * static_cast<std::size_t>(B) + static_cast<std::size_t>(b)) * per];
                for (std::size_t s = 0; s < S; ++s) {
                    const auto& gr = gen[(static_cast<std::size_t>(b) * S + s) * 2];
                    const auto& gi = gen[(static_cast<std::size_t>(b) * S + s) * 2 + 1];
                    const double re = static_cast<double>(msg[s].re), im = static_cast<double>(msg[s].im);
                    for (std::size_t k = 0; k < per; ++k)
                        dst[k] += re * gr[k] + im * gi[k];
                }
            }
        }
    }

    std::uint64_t size() const { return size_; }
    int n_t() const { return n_t_; }
    int T() const { return T_; }
    int B() const { return B_; }

    /// Pointer to the n_t x T row-major block b (0-based) of codeword c.
    const std::complex<double>* block(std::uint64_t c, int b) const
    {
        return &data_[(c * static_cast<std::size_t>(B_) + static_cast<std::size_t>(b)) * static_cast<std::size_t>(n_t_ * T_)];
    }

    Eigen::MatrixXcd block_matrix(std::uint64_t c, int b) const
    {
        Eigen::MatrixXcd out(n_t_, T_);
        const auto* p = block(c, b);
        for (int r = 0; r < n_t_; ++r)
            for (int k = 0; k < T_; ++k)
                out(r, k) = p[r * T_ + k];
        return out;
    }

private:
    int n_t_, T_, B_;
    std::uint64_t size_ = 0;
    std::vector<std::complex<double>> data_;
};

// ---------------------------------------------------------------------------
// NVD

struct NvdCertificate {
    std::optional<Rational> min_value;  // nullopt = +infinity (no distinct pairs)
    std::uint64_t pairs_checked = 0;
    std::string mode;

    bool certified() const { return !min_value || *min_value >= 1; }
    std::string min_string() const { return min_value ? to_fraction_string(*min_value) : "inf"; }
};

/// |prod_i det(phi^i(X(delta)))|^2 on the full T x T form, exactly.
inline Rational nvd_value(const Tower& t, std::span<const GaussInt> delta)
{
    const ExactMatrix X = regular_representation(t, message_elements(t, delta));
    const FieldElement det = exact_determinant(X);
    const FieldElement n = conjugate_norm_product(det);
    return base_norm_squared(n);
}

inline Rational nvd_value(const CodewordX& a, const CodewordX& b)
{
    const Tower& t = *a.ell.at(0).tower();
    std::vector<GaussInt> d(a.coeffs.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = a.coeffs[k] - b.coeffs.at(k);
    return nvd_value(t, d);
}

/// Plain pairwise minimum over an explicit list of codewords.
inline NvdCertificate nvd_min(std::span<const CodewordX> words)
{
    NvdCertificate cert;
    cert.mode = "exhaustive";
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j) {
            if (words[i].coeffs == words[j].coeffs)
                continue;
            Rational v = nvd_value(words[i], words[j]);
            if (!cert.min_value || v < *cert.min_value)
                cert.min_value = v;
            ++cert.pairs_checked;
        }
    return cert;
}

enum class NvdMode { automatic, exhaustive, restricted };

struct NvdOptions {
    NvdMode mode = NvdMode::automatic;
    std::uint64_t exhaustive_pair_limit = 10'000'000;
    std::uint64_t random_pairs = 1'000'000;
    std::uint64_t seed = 1;
};

namespace detail {

/// Caches nvd_value by difference vector; each symbol part is shifted to a digit in [0, 2M-2].
class DifferenceCache {
public:
    DifferenceCache(const Codebook& book) : book_(book), radix_(2 * book.M() - 1)
    {
        const double space = 2.0 * static_cast<double>(book.symbols()) * std::log2(static_cast<double>(radix_));
        dense_ = space <= 24;
        if (dense_) {
            std::size_t n = 1;
            for (std::size_t k = 0; k < 2 * book.symbols(); ++k)
                n *= static_cast<std::size_t>(radix_);
            values_.resize(n);
        }
    }

    const Rational& value(const std::vector<GaussInt>& delta)
    {
        std::uint64_t key = 0;
        for (std::size_t s = delta.size(); s-- > 0;) {
            key = key * static_cast<std::uint64_t>(radix_) + static_cast<std::uint64_t>(delta[s].re / 2 + book_.M() - 1);
            key = key * static_cast<std::uint64_t>(radix_) + static_cast<std::uint64_t>(delta[s].im / 2 + book_.M() - 1);
        }
        if (dense_) {
            auto& slot = values_[key];
            if (!slot)
                slot = nvd_value(*book_.tower(), delta);
            return *slot;
        }
        auto it = sparse_.find(key);
        if (it == sparse_.end())
            it = sparse_.emplace(key, nvd_value(*book_.tower(), delta)).first;
        return it->second;
    }

private:
    const Codebook& book_;
    long radix_;
    bool dense_ = false;
    std::vector<std::optional<Rational>> values_;
    std::unordered_map<std::uint64_t, Rational> sparse_;
};

inline void take_min(NvdCertificate& cert, const Rational& v)
{
    if (!cert.min_value || v < *cert.min_value)
        cert.min_value = v;
}

} // namespace detail

/// Exact pairwise NVD minimum over a codebook. Exhaustive mode visits every unordered
/// pair; restricted mode covers all differences of weight <= 2 plus random pairs.
inline NvdCertificate nvd_min(const Codebook& book, const NvdOptions& opt = {})
{
    NvdMode mode = opt.mode;
    double pairs_log2 = 2 * book.size_log2() - 1;
    if (mode == NvdMode::automatic)
        mode = pairs_log2 <= std::log2(static_cast<double>(opt.exhaustive_pair_limit)) ? NvdMode::exhaustive
                                                                                      : NvdMode::restricted;
    NvdCertificate cert;
    detail::DifferenceCache cache(book);
    const std::size_t S = book.symbols();
    std::vector<GaussInt> delta(S);

    if (mode == NvdMode::exhaustive) {
        cert.mode = "exhaustive";
        const std::uint64_t K = book.size();
        std::vector<std::vector<GaussInt>> msgs(K);
        for (std::uint64_t c = 0; c < K; ++c)
            msgs[c] = book.message(c);
        for (std::uint64_t i = 0; i < K; ++i)
            for (std::uint64_t j = i + 1; j < K; ++j) {
                for (std::size_t s = 0; s < S; ++s)
                    delta[s] = msgs[i][s] - msgs[j][s];
                detail::take_min(cert, cache.value(delta));
                ++cert.pairs_checked;
            }
        return cert;
    }

    cert.mode = "restricted";
    const long M = book.M();
    std::vector<GaussInt> diffs;  // nonzero per-symbol differences
    for (long a = -(M - 1); a <= M - 1; ++a)
        for (long b = -(M - 1); b <= M - 1; ++b)
            if (a != 0 || b != 0)
                diffs.push_back({2 * a, 2 * b});
    const auto& free = book.free_symbols();
    std::fill(delta.begin(), delta.end(), GaussInt{0, 0});
    for (std::size_t a = 0; a < free.size(); ++a)
        for (const auto& d1 : diffs) {
            delta[free[a]] = d1;
            detail::take_min(cert, cache.value(delta));
            ++cert.pairs_checked;
            for (std::size_t b = a + 1; b < free.size(); ++b) {
                for (const auto& d2 : diffs) {
                    delta[free[b]] = d2;
                    detail::take_min(cert, cache.value(delta));
                    ++cert.pairs_checked;
                }
                delta[free[b]] = {0, 0};
            }
            delta[free[a]] = {0, 0};
        }
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, book.constellation().size() - 1);
    const auto& pts = book.constellation().points;
    for (std::uint64_t k = 0; k < opt.random_pairs; ++k) {
        bool nonzero = false;
        for (auto s : free) {
            delta[s] = pts[pick(rng)] - pts[pick(rng)];
            nonzero = nonzero || !(delta[s] == GaussInt{0, 0});
        }
        if (!nonzero)
            continue;
        detail::take_min(cert, cache.value(delta));
        ++cert.pairs_checked;
    }
    return cert;
}

} // namespace cdarelay

#endif // CDARELAY_STCODE_HPP
