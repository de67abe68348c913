#ifndef CDARELAY_FIELDTOWER_HPP
#define CDARELAY_FIELDTOWER_HPP

// Exact arithmetic in the composite field L = K.M used by the division
// algebra codes. L is realised as a tensor product of simple extensions
// Q[x]/(f_k) with pairwise coprime discriminants, so the product of the
// factor power bases is an integral basis of O_L and every element is a
// vector of rationals over that monomial basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cdarelay/error.hpp"
#include "cdarelay/rational.hpp"

namespace cdarelay {

enum class BaseField { rationals, gaussian_rationals };

inline const char* to_string(BaseField b)
{
    return b == BaseField::rationals ? "rationals" : "gaussian-rationals";
}

inline BaseField parse_base_field(const std::string& s)
{
    if (s == "rationals" || s == "Q")
        return BaseField::rationals;
    if (s == "gaussian-rationals" || s == "Q(i)")
        return BaseField::gaussian_rationals;
    throw ValidationError("unknown base field '" + s + "'");
}

struct TowerSpec {
    BaseField base = BaseField::rationals;
    int m = 1;                          // [K : base]
    int T = 2;                          // [M : base]
    std::string k_descriptor = "auto";  // concrete K, or "auto" for the catalog default
    std::string m_descriptor = "auto";
    int B = 0;                          // block count the tower is meant for; 0 = unspecified
};

/// Which generator of Gal(L/base) moves a tensor factor. Base factors are fixed by both.
enum class FactorRole { base, phi, sigma };

/// One simple extension Q[x]/(f) of the tensor decomposition.
struct FieldFactor {
    std::string name;
    std::vector<long> minpoly;       // monic, low degree first
    std::vector<long> automorphism;  // image of x as a polynomial of degree < deg f
    FactorRole role = FactorRole::base;
    std::complex<long double> root;  // complex root used by the default embedding

    std::size_t degree() const { return minpoly.size() - 1; }
};

class Tower;
using TowerPtr = std::shared_ptr<const Tower>;

/// Element of L as exact rational coordinates over the tower's monomial basis.
class FieldElement {
public:
    FieldElement() = default;
    FieldElement(TowerPtr tower, std::vector<Rational> coords);

    const TowerPtr& tower() const { return tower_; }
    const std::vector<Rational>& coords() const { return coords_; }
    const Rational& operator[](std::size_t i) const { return coords_[i]; }

    bool is_zero() const
    {
        return std::all_of(coords_.begin(), coords_.end(), [](const Rational& q) { return q == 0; });
    }
    /// Integral iff every coordinate over the integral basis is an integer.
    bool is_integral() const { return std::all_of(coords_.begin(), coords_.end(), is_integer); }

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement scaled(const Rational& q) const;
    FieldElement inverse() const;

    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

    friend bool operator==(const FieldElement& a, const FieldElement& b)
    {
        return a.tower_ == b.tower_ && a.coords_ == b.coords_;
    }

private:
    void check_same(const FieldElement& o) const
    {
        if (tower_ != o.tower_)
            throw TowerMismatch("field elements belong to different towers");
    }

    TowerPtr tower_;
    std::vector<Rational> coords_;
};

enum class AutomorphismKind { phi, sigma };

/// phi^power or sigma^power as an exact action on coordinate vectors.
struct Automorphism {
    AutomorphismKind kind = AutomorphismKind::phi;
    int power = 1;
    RationalMatrix action;
    const Tower* tower = nullptr;
};

/// Complex embedding L -> C fixed by one root per tensor factor.
struct Embedding {
    int precision_bits = std::numeric_limits<long double>::digits;
    std::vector<std::complex<long double>> roots;
};

class Tower : public std::enable_shared_from_this<Tower> {
public:
    Tower(std::string id, TowerSpec spec, std::vector<FieldFactor> factors, GaussInt gamma);

    const std::string& id() const { return id_; }
    const TowerSpec& spec() const { return spec_; }
    const std::vector<FieldFactor>& factors() const { return factors_; }
    int m() const { return spec_.m; }
    int T() const { return spec_.T; }
    BaseField base() const { return spec_.base; }

    /// [L : Q]
    std::size_t degree() const { return n_; }
    /// [L : Q(i)]; the number of Gaussian-integer coordinates of one l_i.
    std::size_t gaussian_degree() const { return message_basis_.size(); }

    std::vector<int> exponents(std::size_t index) const
    {
        std::vector<int> e(factors_.size());
        for (std::size_t k = 0; k < factors_.size(); ++k)
            e[k] = static_cast<int>((index / strides_[k]) % factors_[k].degree());
        return e;
    }

    const RationalMatrix& phi_matrix() const { return phi_; }
    const RationalMatrix& sigma_matrix() const { return sigma_; }
    Automorphism phi(int power = 1) const { return make_aut(AutomorphismKind::phi, power); }
    Automorphism sigma(int power = 1) const { return make_aut(AutomorphismKind::sigma, power); }

    FieldElement zero() const { return {self(), std::vector<Rational>(n_)}; }
    FieldElement one() const { return from_gauss({1, 0}); }
    FieldElement from_rational(const Rational& q) const
    {
        std::vector<Rational> c(n_);
        c[0] = q;
        return {self(), std::move(c)};
    }
    FieldElement from_gauss(GaussInt z) const
    {
        std::vector<Rational> c(n_);
        c[0] = z.re;
        c[i_index_] += z.im;
        return {self(), std::move(c)};
    }
    /// Basis monomial number `index`.
    FieldElement basis_element(std::size_t index) const
    {
        std::vector<Rational> c(n_);
        c.at(index) = 1;
        return {self(), std::move(c)};
    }
    /// Generator x_k of tensor factor k.
    FieldElement generator(std::size_t factor) const
    {
        if (factors_.at(factor).degree() < 2)
            return one();
        return basis_element(strides_[factor]);
    }
    FieldElement imaginary_unit() const { return basis_element(i_index_); }
    FieldElement gamma() const { return from_gauss(gamma_); }
    GaussInt gamma_value() const { return gamma_; }

    /// Monomials with zero exponent in the i-factor: a Z[i]-basis of O_L.
    const std::vector<std::size_t>& message_basis() const { return message_basis_; }
    std::size_t imaginary_index() const { return i_index_; }

    bool in_base(const FieldElement& x) const { return supported_on(x, base_mask_); }
    bool in_K(const FieldElement& x) const { return supported_on(x, k_mask_); }
    bool in_M(const FieldElement& x) const { return supported_on(x, m_mask_); }
    /// Monomials spanning K over the base field (zero exponent in sigma and base factors).
    const std::vector<std::size_t>& k_relative_basis() const { return k_relative_; }

    FieldElement multiply(const FieldElement& a, const FieldElement& b) const;
    FieldElement apply(const Automorphism& a, const FieldElement& x) const;
    FieldElement apply_phi(const FieldElement& x, int power = 1) const { return apply_sparse(phi_pows_, m(), power, x); }
    FieldElement apply_sigma(const FieldElement& x, int power = 1) const { return apply_sparse(sigma_pows_, T(), power, x); }

    /// Matrix of y -> x*y over Q in the monomial basis.
    RationalMatrix multiplication_matrix(const FieldElement& x) const;

    Embedding default_embedding() const
    {
        Embedding e;
        for (const auto& f : factors_)
            e.roots.push_back(f.root);
        return e;
    }
    std::complex<long double> embed_ld(const FieldElement& x) const;
    std::complex<long double> embed_ld(const FieldElement& x, const Embedding& e) const;
    std::complex<double> embed(const FieldElement& x) const
    {
        auto z = embed_ld(x);
        return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
    }
    /// Embedded value of each basis monomial under the default embedding.
    const std::vector<std::complex<long double>>& basis_embedding() const { return basis_embed_; }

    void check_member(const FieldElement& x) const
    {
        if (x.tower().get() != this)
            throw TowerMismatch("element does not belong to tower " + id_);
    }

private:
    struct SparseEntry {
        std::uint32_t row;
        std::uint32_t col;
        long value;
    };
    using SparseMatrix = std::vector<SparseEntry>;

    TowerPtr self() const { return shared_from_this(); }
    Automorphism make_aut(AutomorphismKind kind, int power) const;
    FieldElement apply_sparse(const std::vector<SparseMatrix>& pows, int order, int power, const FieldElement& x) const;
    bool supported_on(const FieldElement& x, const std::vector<bool>& mask) const
    {
        check_member(x);
        for (std::size_t i = 0; i < n_; ++i)
            if (!mask[i] && x[i] != 0)
                return false;
        return true;
    }
    RationalMatrix role_matrix(FactorRole role) const;
    static SparseMatrix to_sparse(const RationalMatrix& m);

    std::string id_;
    TowerSpec spec_;
    std::vector<FieldFactor> factors_;
    GaussInt gamma_;
    std::size_t n_ = 1;
    std::vector<std::size_t> strides_;
    std::size_t i_index_ = 0;
    std::size_t i_factor_ = 0;
    std::vector<std::vector<std::pair<std::uint32_t, long>>> product_;  // (u*n + v) -> terms
    RationalMatrix phi_;
    RationalMatrix sigma_;
    std::vector<SparseMatrix> phi_pows_;
    std::vector<SparseMatrix> sigma_pows_;
    std::vector<bool> base_mask_, k_mask_, m_mask_;
    std::vector<std::size_t> message_basis_;
    std::vector<std::size_t> k_relative_;
    std::vector<std::complex<long double>> basis_embed_;
};

// ---------------------------------------------------------------------------
// polynomial helpers over Z[x]/(f)

namespace detail {

/// x^0 .. x^(2d-2) reduced modulo the monic polynomial f.
inline std::vector<std::vector<long>> power_reductions(const std::vector<long>& f)
{
    const std::size_t d = f.size() - 1;
    const std::size_t count = d == 0 ? 1 : 2 * d - 1;
    std::vector<std::vector<long>> out;
    std::vector<long> cur(d == 0 ? 1 : d, 0);
    if (d > 0)
        cur[0] = 1;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(cur);
        if (d == 0)
            break;
        // multiply by x then reduce the x^d term
        const long top = cur[d - 1];
        for (std::size_t j = d - 1; j > 0; --j)
            cur[j] = cur[j - 1];
        cur[0] = 0;
        for (std::size_t j = 0; j < d; ++j)
            cur[j] -= top * f[j];
    }
    return out;
}

inline std::vector<long> poly_mulmod(const std::vector<long>& a, const std::vector<long>& b,
                                     const std::vector<std::vector<long>>& red)
{
    const std::size_t d = a.size();
    std::vector<long> out(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        if (a[i] == 0)
            continue;
        for (std::size_t j = 0; j < d; ++j) {
            if (b[j] == 0)
                continue;
            const auto& r = red[i + j];
            for (std::size_t k = 0; k < d; ++k)
                out[k] += a[i] * b[j] * r[k];
        }
    }
    return out;
}

inline int matrix_order(const RationalMatrix& a, int limit)
{
    RationalMatrix p = a;
    for (int k = 1; k <= limit; ++k) {
        if (p.is_identity())
            return k;
        p = p * a;
    }
    return -1;
}

} // namespace detail

// ---------------------------------------------------------------------------
// FieldElement

inline FieldElement::FieldElement(TowerPtr tower, std::vector<Rational> coords)
    : tower_(std::move(tower)), coords_(std::move(coords))
{
    if (!tower_ || coords_.size() != tower_->degree())
        throw ValidationError("coordinate vector length does not match tower degree");
}

inline FieldElement FieldElement::operator+(const FieldElement& o) const
{
    check_same(o);
    std::vector<Rational> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] += o.coords_[i];
    return {tower_, std::move(c)};
}

inline FieldElement FieldElement::operator-(const FieldElement& o) const
{
    check_same(o);
    std::vector<Rational> c(coords_);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] -= o.coords_[i];
    return {tower_, std::move(c)};
}

inline FieldElement FieldElement::operator-() const
{
    std::vector<Rational> c(coords_);
    for (auto& q : c)
        q = -q;
    return {tower_, std::move(c)};
}

inline FieldElement FieldElement::scaled(const Rational& q) const
{
    std::vector<Rational> c(coords_);
    for (auto& v : c)
        v *= q;
    return {tower_, std::move(c)};
}

inline FieldElement FieldElement::operator*(const FieldElement& o) const
{
    check_same(o);
    return tower_->multiply(*this, o);
}

inline FieldElement FieldElement::inverse() const
{
    if (is_zero())
        throw DomainError("inverse of zero");
    const Tower& t = *tower_;
    return {tower_, t.multiplication_matrix(*this).solve(t.one().coords())};
}

// ---------------------------------------------------------------------------
// Tower

inline Tower::Tower(std::string id, TowerSpec spec, std::vector<FieldFactor> factors, GaussInt gamma)
    : id_(std::move(id)), spec_(std::move(spec)), factors_(std::move(factors)), gamma_(gamma)
{
    strides_.resize(factors_.size());
    n_ = 1;
    bool have_i = false;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        strides_[k] = n_;
        n_ *= factors_[k].degree();
        if (factors_[k].name == "i") {
            i_index_ = strides_[k];
            i_factor_ = k;
            have_i = true;
        }
    }
    if (!have_i)
        throw ValidationError("tower " + id_ + " lacks the Gaussian factor Q(i)");

    // multiplication table from per-factor reductions
    std::vector<std::vector<std::vector<long>>> red;
    for (const auto& f : factors_)
        red.push_back(detail::power_reductions(f.minpoly));
    product_.assign(n_ * n_, {});
    for (std::size_t u = 0; u < n_; ++u) {
        const auto eu = exponents(u);
        for (std::size_t v = 0; v < n_; ++v) {
            const auto ev = exponents(v);
            // tensor product of reduced factor powers
            std::vector<std::pair<std::uint32_t, long>> terms{{0u, 1L}};
            for (std::size_t k = 0; k < factors_.size(); ++k) {
                const auto& r = red[k][static_cast<std::size_t>(eu[k] + ev[k])];
                std::vector<std::pair<std::uint32_t, long>> next;
                for (const auto& [idx, c] : terms)
                    for (std::size_t j = 0; j < r.size(); ++j)
                        if (r[j] != 0)
                            next.emplace_back(static_cast<std::uint32_t>(idx + j * strides_[k]), c * r[j]);
                terms = std::move(next);
            }
            product_[u * n_ + v] = std::move(terms);
        }
    }

    phi_ = role_matrix(FactorRole::phi);
    sigma_ = role_matrix(FactorRole::sigma);
    if (detail::matrix_order(phi_, 64) != spec_.m)
        throw Error("tower " + id_ + ": phi does not have order m");
    if (detail::matrix_order(sigma_, 64) != spec_.T)
        throw Error("tower " + id_ + ": sigma does not have order T");
    if (!(phi_ * sigma_ == sigma_ * phi_))
        throw Error("tower " + id_ + ": phi and sigma do not commute");
    for (int k = 0; k < spec_.m; ++k)
        phi_pows_.push_back(to_sparse(phi_.pow(static_cast<unsigned>(k))));
    for (int k = 0; k < spec_.T; ++k)
        sigma_pows_.push_back(to_sparse(sigma_.pow(static_cast<unsigned>(k))));

    base_mask_.assign(n_, false);
    k_mask_.assign(n_, true);
    m_mask_.assign(n_, true);
    for (std::size_t idx = 0; idx < n_; ++idx) {
        const auto e = exponents(idx);
        bool only_base = true;
        bool in_k_rel = true;
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            if (e[k] == 0)
                continue;
            const FactorRole role = factors_[k].role;
            if (role == FactorRole::sigma)
                k_mask_[idx] = false;
            if (role == FactorRole::phi)
                m_mask_[idx] = false;
            if (role != FactorRole::base)
                only_base = false;
            if (role != FactorRole::phi)
                in_k_rel = false;
        }
        base_mask_[idx] = only_base;
        if (in_k_rel)
            k_relative_.push_back(idx);
        if (e[i_factor_] == 0)
            message_basis_.push_back(idx);
    }

    basis_embed_.resize(n_);
    const auto roots = default_embedding().roots;
    for (std::size_t idx = 0; idx < n_; ++idx) {
        const auto e = exponents(idx);
        std::complex<long double> z = 1.0L;
        for (std::size_t k = 0; k < factors_.size(); ++k)
            for (int p = 0; p < e[k]; ++p)
                z *= roots[k];
        basis_embed_[idx] = z;
    }
}

inline RationalMatrix Tower::role_matrix(FactorRole role) const
{
    // per-factor action: automorphism matrix if the factor has this role, identity otherwise
    std::vector<std::vector<std::vector<long>>> cols;
    for (const auto& f : factors_) {
        const std::size_t d = f.degree();
        std::vector<std::vector<long>> c(d, std::vector<long>(d, 0));
        if (f.role == role) {
            const auto red = detail::power_reductions(f.minpoly);
            std::vector<long> g(d, 0);
            for (std::size_t j = 0; j < f.automorphism.size(); ++j)
                g[j] = f.automorphism[j];
            std::vector<long> p(d, 0);
            p[0] = 1;
            for (std::size_t j = 0; j < d; ++j) {
                c[j] = p;
                p = detail::poly_mulmod(p, g, red);
            }
        } else {
            for (std::size_t j = 0; j < d; ++j)
                c[j][j] = 1;
        }
        cols.push_back(std::move(c));
    }
    RationalMatrix out(n_, n_);
    for (std::size_t in = 0; in < n_; ++in) {
        const auto e = exponents(in);
        std::vector<std::pair<std::size_t, long>> terms{{0, 1}};
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            const auto& col = cols[k][static_cast<std::size_t>(e[k])];
            std::vector<std::pair<std::size_t, long>> next;
            for (const auto& [idx, c] : terms)
                for (std::size_t j = 0; j < col.size(); ++j)
                    if (col[j] != 0)
                        next.emplace_back(idx + j * strides_[k], c * col[j]);
            terms = std::move(next);
        }
        for (const auto& [row, c] : terms)
            out(row, in) += c;
    }
    return out;
}

inline Tower::SparseMatrix Tower::to_sparse(const RationalMatrix& m)
{
    SparseMatrix out;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0) {
                // automorphisms of an integral basis have integer matrices
                out.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), m(r, c).get_num().get_si()});
            }
    return out;
}

inline Automorphism Tower::make_aut(AutomorphismKind kind, int power) const
{
    const int order = kind == AutomorphismKind::phi ? spec_.m : spec_.T;
    const int p = ((power % order) + order) % order;
    const RationalMatrix& g = kind == AutomorphismKind::phi ? phi_ : sigma_;
    return Automorphism{kind, p, g.pow(static_cast<unsigned>(p)), this};
}

inline FieldElement Tower::apply(const Automorphism& a, const FieldElement& x) const
{
    check_member(x);
    if (a.tower != this)
        throw TowerMismatch("automorphism from tower other than " + id_);
    return {self(), a.action.apply(x.coords())};
}

inline FieldElement Tower::apply_sparse(const std::vector<SparseMatrix>& pows, int order, int power,
                                        const FieldElement& x) const
{
    check_member(x);
    const int p = ((power % order) + order) % order;
    std::vector<Rational> out(n_);
    for (const auto& e : pows[static_cast<std::size_t>(p)])
        if (x[e.col] != 0)
            out[e.row] += x[e.col] * e.value;
    return {self(), std::move(out)};
}

inline FieldElement Tower::multiply(const FieldElement& a, const FieldElement& b) const
{
    check_member(a);
    check_member(b);
    std::vector<Rational> out(n_);
    Rational t;
    for (std::size_t u = 0; u < n_; ++u) {
        if (a[u] == 0)
            continue;
        for (std::size_t v = 0; v < n_; ++v) {
            if (b[v] == 0)
                continue;
            t = a[u] * b[v];
            for (const auto& [w, c] : product_[u * n_ + v])
                out[w] += t * c;
        }
    }
    return {self(), std::move(out)};
}

inline RationalMatrix Tower::multiplication_matrix(const FieldElement& x) const
{
    RationalMatrix out(n_, n_);
    for (std::size_t j = 0; j < n_; ++j) {
        const auto col = multiply(x, basis_element(j));
        for (std::size_t i = 0; i < n_; ++i)
            out(i, j) = col[i];
    }
    return out;
}

inline std::complex<long double> Tower::embed_ld(const FieldElement& x) const
{
    check_member(x);
    std::complex<long double> z = 0.0L;
    for (std::size_t i = 0; i < n_; ++i)
        if (x[i] != 0)
            z += to_long_double(x[i]) * basis_embed_[i];
    return z;
}

inline std::complex<long double> Tower::embed_ld(const FieldElement& x, const Embedding& e) const
{
    check_member(x);
    if (e.roots.size() != factors_.size())
        throw ValidationError("embedding root count does not match tower factors");
    std::complex<long double> z = 0.0L;
    for (std::size_t i = 0; i < n_; ++i) {
        if (x[i] == 0)
            continue;
        const auto ex = exponents(i);
        std::complex<long double> b = 1.0L;
        for (std::size_t k = 0; k < factors_.size(); ++k)
            for (int p = 0; p < ex[k]; ++p)
                b *= e.roots[k];
        z += to_long_double(x[i]) * b;
    }
    return z;
}

// ---------------------------------------------------------------------------
// free operations

inline FieldElement apply_automorphism(const Automorphism& a, const FieldElement& x)
{
    if (!x.tower() || a.tower != x.tower().get())
        throw TowerMismatch("automorphism and element belong to different towers");
    return x.tower()->apply(a, x);
}

inline std::complex<double> embed(const FieldElement& x) { return x.tower()->embed(x); }

inline std::complex<long double> embed(const FieldElement& x, const Embedding& e)
{
    return x.tower()->embed_ld(x, e);
}

/// prod_{i<m} phi^i(x) for x in K. The result lies in the base field.
inline FieldElement conjugate_norm_product(const FieldElement& x)
{
    const Tower& t = *x.tower();
    if (!t.in_K(x))
        throw DomainError("conjugate_norm_product: input is not in K");
    FieldElement acc = x;
    for (int i = 1; i < t.m(); ++i)
        acc = acc * t.apply_phi(x, i);
    if (!t.in_base(acc))
        throw Error("conjugate_norm_product: result escaped the base field");
    return acc;
}

/// |z|^2 of a base-field element, exactly.
inline Rational base_norm_squared(const FieldElement& z)
{
    const Tower& t = *z.tower();
    if (!t.in_base(z))
        throw DomainError("base_norm_squared: element is not in the base field");
    const Rational& re = z[0];
    const Rational& im = z[t.imaginary_index()];
    return re * re + im * im;
}

// ---------------------------------------------------------------------------
// catalog

namespace detail {

inline FieldFactor gaussian_factor(FactorRole role)
{
    return {"i", {1, 0, 1}, {0, -1}, role, {0.0L, 1.0L}};
}

/// Real cyclic subfield Q(zeta_p + zeta_p^-1); phi maps eta -> eta^2 - 2.
inline FieldFactor real_cyclotomic_factor(int conductor, FactorRole role)
{
    const long double eta = 2.0L * std::cos(2.0L * std::numbers::pi_v<long double> / conductor);
    switch (conductor) {
    case 7:
        return {"eta7", {-1, -2, 1, 1}, {-2, 0, 1}, role, {eta, 0.0L}};
    case 9:
        return {"eta9", {1, -3, 0, 1}, {-2, 0, 1}, role, {eta, 0.0L}};
    case 11:
        return {"eta11", {1, 3, -3, -4, 1, 1}, {-2, 0, 1}, role, {eta, 0.0L}};
    default:
        throw UnsupportedTower("no real cyclotomic factor for conductor " + std::to_string(conductor));
    }
}

inline FieldFactor golden_factor(FactorRole role)
{
    return {"golden", {-1, -1, 1}, {1, -1}, role, {(1.0L + std::sqrt(5.0L)) / 2.0L, 0.0L}};
}

inline FieldFactor zeta5_factor(FactorRole role)
{
    const long double a = 2.0L * std::numbers::pi_v<long double> / 5.0L;
    return {"zeta5", {1, 1, 1, 1, 1}, {0, 0, 1}, role, {std::cos(a), std::sin(a)}};
}

struct CatalogEntry {
    std::string id;
    BaseField base;
    int m;
    int T;
    std::string k_descriptor;
    std::string m_descriptor;
    GaussInt gamma;
    std::vector<FieldFactor> (*factors)();
};

inline const std::vector<CatalogEntry>& catalog_entries()
{
    using R = FactorRole;
    static const std::vector<CatalogEntry> entries = {
        {"sr-m1", BaseField::rationals, 1, 2, "Q", "Q(i)", {-1, 0},
         [] { return std::vector<FieldFactor>{gaussian_factor(R::sigma)}; }},
        {"sr-m3", BaseField::rationals, 3, 2, "Q(zeta9)^+", "Q(i)", {-1, 0},
         [] { return std::vector<FieldFactor>{real_cyclotomic_factor(9, R::phi), gaussian_factor(R::sigma)}; }},
        {"sr-m5", BaseField::rationals, 5, 2, "Q(zeta11)^+", "Q(i)", {-1, 0},
         [] { return std::vector<FieldFactor>{real_cyclotomic_factor(11, R::phi), gaussian_factor(R::sigma)}; }},
        {"gi-m1-t2", BaseField::gaussian_rationals, 1, 2, "Q(i)", "Q(i,sqrt5)", {0, 1},
         [] { return std::vector<FieldFactor>{gaussian_factor(R::base), golden_factor(R::sigma)}; }},
        {"gi-m3-t2", BaseField::gaussian_rationals, 3, 2, "Q(i,zeta9^+)", "Q(i,sqrt5)", {0, 1},
         [] {
             return std::vector<FieldFactor>{gaussian_factor(R::base), real_cyclotomic_factor(9, R::phi),
                                             golden_factor(R::sigma)};
         }},
        {"gi-m2-t3", BaseField::gaussian_rationals, 2, 3, "Q(i,sqrt5)", "Q(i,zeta7^+)", {2, 1},
         [] {
             return std::vector<FieldFactor>{gaussian_factor(R::base), golden_factor(R::phi),
                                             real_cyclotomic_factor(7, R::sigma)};
         }},
        {"gi-m5-t4", BaseField::gaussian_rationals, 5, 4, "Q(i,zeta11^+)", "Q(i,zeta5)", {1, 1},
         [] {
             return std::vector<FieldFactor>{gaussian_factor(R::base), real_cyclotomic_factor(11, R::phi),
                                             zeta5_factor(R::sigma)};
         }},
    };
    return entries;
}

inline TowerPtr instantiate(const CatalogEntry& e, int B)
{
    TowerSpec spec{e.base, e.m, e.T, e.k_descriptor, e.m_descriptor, B};
    return std::make_shared<Tower>(e.id, spec, e.factors(), e.gamma);
}

} // namespace detail

inline std::vector<std::string> catalog_ids()
{
    std::vector<std::string> ids;
    for (const auto& e : detail::catalog_entries())
        ids.push_back(e.id);
    return ids;
}

inline void validate(const TowerSpec& spec)
{
    if (spec.m < 1 || spec.T < 1)
        throw ValidationError("tower degrees m and T must be positive");
    if (std::gcd(spec.m, spec.T) != 1)
        throw ValidationError("gcd(m, T) must be 1, got m=" + std::to_string(spec.m) + " T=" + std::to_string(spec.T));
    if (spec.B < 0)
        throw ValidationError("block count B must be nonnegative");
    if (spec.B > 0 && spec.m < spec.B)
        throw ValidationError("need m >= B, got m=" + std::to_string(spec.m) + " B=" + std::to_string(spec.B));
    if (spec.base == BaseField::rationals && spec.T != 2)
        throw ValidationError("towers over Q use M = Q(i), so T must be 2");
}

/// Builds the catalog tower matching `spec`; the result satisfies phi^m = sigma^T = id, phi.sigma = sigma.phi.
inline TowerPtr build_tower(const TowerSpec& spec)
{
    validate(spec);
    for (const auto& e : detail::catalog_entries()) {
        if (e.base != spec.base || e.m != spec.m || e.T != spec.T)
            continue;
        if (spec.k_descriptor != "auto" && spec.k_descriptor != e.k_descriptor)
            continue;
        if (spec.m_descriptor != "auto" && spec.m_descriptor != e.m_descriptor)
            continue;
        return detail::instantiate(e, spec.B);
    }
    throw UnsupportedTower("no concrete field instantiation for base=" + std::string(to_string(spec.base)) +
                           " m=" + std::to_string(spec.m) + " T=" + std::to_string(spec.T));
}

inline TowerPtr catalog_tower(const std::string& id, int B = 0)
{
    for (const auto& e : detail::catalog_entries())
        if (e.id == id) {
            TowerSpec spec{e.base, e.m, e.T, e.k_descriptor, e.m_descriptor, B};
            validate(spec);
            return detail::instantiate(e, B);
        }
    throw UnsupportedTower("unknown tower catalog id '" + id + "'");
}

} // namespace cdarelay

#endif // CDARELAY_FIELDTOWER_HPP
