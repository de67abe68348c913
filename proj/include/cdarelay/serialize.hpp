#ifndef CDARELAY_SERIALIZE_HPP
#define CDARELAY_SERIALIZE_HPP

// JSON documents for towers, codewords and NVD certificates. Rationals are "p/q" strings.

#include <json.hpp>

#include <string>

#include "cdarelay/fieldtower.hpp"
#include "cdarelay/stcode.hpp"

namespace cdarelay {

inline constexpr int kTowerSchemaVersion = 1;

inline nlohmann::json to_json(const RationalMatrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k)
            r.push_back(to_fraction_string(m(i, k)));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline nlohmann::json to_json(const FieldElement& x)
{
    nlohmann::json c = nlohmann::json::array();
    for (const auto& q : x.coords())
        c.push_back(to_fraction_string(q));
    return c;
}

inline const char* to_string(FactorRole r)
{
    switch (r) {
    case FactorRole::base: return "base";
    case FactorRole::phi: return "phi";
    case FactorRole::sigma: return "sigma";
    }
    return "?";
}

inline nlohmann::json tower_json(const Tower& t)
{
    nlohmann::json j;
    j["schema_version"] = kTowerSchemaVersion;
    j["id"] = t.id();
    j["base"] = to_string(t.base());
    j["m"] = t.m();
    j["T"] = t.T();
    j["K"] = t.spec().k_descriptor;
    j["M"] = t.spec().m_descriptor;
    j["gamma"] = to_json(t.gamma());
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : t.factors())
        factors.push_back({{"name", f.name},
                           {"role", to_string(f.role)},
                           {"minpoly", f.minpoly},
                           {"automorphism", f.automorphism},
                           {"root", {static_cast<double>(f.root.real()), static_cast<double>(f.root.imag())}}});
    j["factors"] = std::move(factors);
    j["message_basis"] = t.message_basis();
    j["phi"] = to_json(t.phi_matrix());
    j["sigma"] = to_json(t.sigma_matrix());
    return j;
}

inline nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& A)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index k = 0; k < A.cols(); ++k)
            r.push_back({A(i, k).real(), A(i, k).imag()});
        rows.push_back(std::move(r));
    }
    return rows;
}

inline nlohmann::json codeword_json(const Codebook& book, std::uint64_t index, const AssembledCodeword& assembled)
{
    const auto x = book.codeword(index);
    nlohmann::json j;
    j["index"] = index;
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& g : x.coeffs)
        coeffs.push_back({g.re, g.im});
    j["coefficients"] = std::move(coeffs);
    nlohmann::json exact = nlohmann::json::array();
    for (const auto& row : x.exact) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& e : row)
            r.push_back(to_json(e));
        exact.push_back(std::move(r));
    }
    j["exact"] = std::move(exact);
    j["embedded"] = complex_matrix_json(assembled.matrix());
    return j;
}

inline nlohmann::json to_json(const NvdCertificate& c)
{
    return {{"min_value", c.min_string()},
            {"pairs_checked", c.pairs_checked},
            {"mode", c.mode},
            {"certified", c.certified()}};
}

} // namespace cdarelay

#endif // CDARELAY_SERIALIZE_HPP
