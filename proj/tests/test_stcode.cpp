#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cdarelay/stcode.hpp"

using namespace cdarelay;

namespace {

constexpr double kEps = 1e-9;

std::vector<GaussInt> random_message(const Codebook& book, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> d(0, book.constellation().size() - 1);
    std::vector<GaussInt> msg(book.symbols());
    for (auto& z : msg)
        z = book.constellation().points[d(rng)];
    return msg;
}

double max_abs(const Eigen::MatrixXcd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

TEST(Qam, SmallConstellations)
{
    auto q2 = qam(2);
    ASSERT_EQ(q2.size(), 4u);
    for (GaussInt z : {GaussInt{1, 1}, GaussInt{1, -1}, GaussInt{-1, 1}, GaussInt{-1, -1}})
        EXPECT_TRUE(q2.contains(z));
    auto q4 = qam(4);
    ASSERT_EQ(q4.size(), 16u);
    for (const auto& z : q4.points) {
        EXPECT_TRUE(std::abs(z.re) == 1 || std::abs(z.re) == 3);
        EXPECT_TRUE(std::abs(z.im) == 1 || std::abs(z.im) == 3);
        EXPECT_TRUE(q4.contains(-z));
        EXPECT_TRUE(q4.contains({z.re, -z.im}));
        EXPECT_EQ(q4.points[q4.index_of(z)], z);
    }
    EXPECT_EQ(min_squared_distance(q2), 4);
    EXPECT_EQ(min_squared_distance(q4), 4);
    EXPECT_THROW(qam(3), ValidationError);
    EXPECT_THROW(qam(0), ValidationError);
}

TEST(CodeParams, ThetaAndAutoM)
{
    auto t = catalog_tower("sr-m3");
    // e = r B T / (2m) = 0.25 at r=0.25, B=3; rho^e = 10 at 40 dB
    auto p = make_code_params(*t, 2, 3, 0.25, 1e4, {}, 3);
    EXPECT_NEAR(p.theta * p.theta, std::pow(1e4, 0.75), 1e-6);
    EXPECT_EQ(p.M, 4);
    auto fixed = make_code_params(*t, 2, 3, 0.25, 1e4, MPolicy::parse("fixed:2"), 3);
    EXPECT_EQ(fixed.M, 2);
    EXPECT_EQ(make_code_params(*t, 2, 3, 0.0, 1e4, {}, 3).M, 2);
    EXPECT_THROW(make_code_params(*t, 2, 4, 0.25, 1e4, {}, 4), ValidationError);
    EXPECT_THROW(MPolicy::parse("fixed:3"), ValidationError);
    EXPECT_THROW(MPolicy::parse("sometimes"), ValidationError);
}

TEST(EncodeX, AlamoutiForm)
{
    auto t = catalog_tower("sr-m1");
    CodeParams p;
    p.T = 2;
    p.m = 1;
    p.M = 4;
    const std::vector<GaussInt> msg{{1, 3}, {-3, 1}};
    auto x = encode_x(msg, p, *t);
    const std::complex<double> l0(1, 3), l1(-3, 1);
    Eigen::Matrix2cd expect;
    expect << l0, -std::conj(l1), l1, std::conj(l0);
    EXPECT_LE(max_abs(x.entries - expect), kEps);
    EXPECT_THROW(encode_x({{1, 2}, {1, 1}}, p, *t), ValidationError);
    EXPECT_THROW(encode_x({{1, 1}}, p, *t), ValidationError);
}

TEST(EncodeX, AllZeroMessageGivesZeroMatrix)
{
    auto t = catalog_tower("gi-m3-t2");
    std::vector<GaussInt> zero(symbol_count(*t));
    auto X = regular_representation(*t, message_elements(*t, zero));
    for (const auto& row : X)
        for (const auto& e : row)
            EXPECT_TRUE(e.is_zero());
}

TEST(EncodeX, TwoByTwoDeterminantExpansion)
{
    std::mt19937_64 rng(4);
    for (const char* id : {"sr-m1", "sr-m3", "gi-m1-t2", "gi-m3-t2"}) {
        auto t = catalog_tower(id);
        Codebook book(t, 2, 2);
        for (int k = 0; k < 10; ++k) {
            auto x = encode_x(random_message(book, rng), book.params(), *t);
            const auto& l = x.ell;
            FieldElement expect = l[0] * t->apply_sigma(l[0]) - t->gamma() * l[1] * t->apply_sigma(l[1]);
            EXPECT_EQ(exact_determinant(x.exact), expect);
            EXPECT_EQ(x.exact[0][0] * x.exact[1][1] - x.exact[0][1] * x.exact[1][0], expect);
        }
    }
}

TEST(EncodeX, RowDeletionConsistency)
{
    std::mt19937_64 rng(8);
    auto t = catalog_tower("gi-m2-t3");
    Codebook book(t, 2, 2);
    for (int k = 0; k < 5; ++k) {
        auto x = encode_x(random_message(book, rng), book.params(), *t);
        ASSERT_EQ(x.entries.rows(), 2);
        ASSERT_EQ(x.entries.cols(), 3);
        EXPECT_LE(max_abs(x.entries - embed_rows(*t, x.exact, 3).topRows(2)), kEps);
    }
}

TEST(Assemble, SingleBlockIsScaledCodeword)
{
    auto t = catalog_tower("gi-m1-t2");
    Codebook book(t, 2, 2);
    CodeParams p = book.params(1);
    p.theta = 3.5;
    auto x = book.codeword(17);
    auto a = assemble(*t, x, Layout::block_diagonal, p);
    EXPECT_LE(max_abs(a.matrix() - 3.5 * x.entries), kEps);
}

TEST(Assemble, StackedTwoBlocks)
{
    auto t = catalog_tower("sr-m3");
    Codebook book(t, 2, 2);
    CodeParams p = book.params(2);
    p.theta = 2.0;
    auto x = book.codeword(1234);
    auto a = assemble(*t, x, Layout::stacked, p);
    auto S = a.matrix();
    ASSERT_EQ(S.rows(), 4);
    ASSERT_EQ(S.cols(), 2);
    EXPECT_LE(max_abs(S.topRows(2) - 2.0 * x.entries), kEps);
    EXPECT_LE(max_abs(S.bottomRows(2) - 2.0 * embed_rows(*t, apply_phi(*t, x.exact, 1), 2)), kEps);
    auto bd = assemble(*t, x, Layout::block_diagonal, p).matrix();
    EXPECT_EQ(bd.rows(), 4);
    EXPECT_EQ(bd.cols(), 4);
}

TEST(Assemble, FourRelayPatterning)
{
    auto t = catalog_tower("gi-m5-t4");
    Codebook book(t, 2, 4);
    CodeParams p = book.params(4);
    p.theta = 1.5;
    std::mt19937_64 rng(1);
    auto x = encode_x(random_message(book, rng), p, *t);
    auto sched = ActivationSchedule::from_sets({{1}, {1, 3}, {1, 3}, {1, 3, 4}});
    auto a = assemble(*t, x, Layout::ddf_patterned, p, &sched);
    ASSERT_EQ(a.blocks.size(), 4u);
    auto D = a.matrix();
    EXPECT_EQ(D.rows(), 16);
    EXPECT_EQ(D.cols(), 16);
    for (int b = 0; b < 4; ++b) {
        const Eigen::MatrixXcd full = 1.5 * conjugate_block(*t, x, b, 4);
        for (int n = 1; n <= 4; ++n) {
            const bool on = sched.active(n, b + 1);
            Eigen::MatrixXcd expect = on ? Eigen::MatrixXcd(full.row(n - 1)) : Eigen::MatrixXcd::Zero(1, 4);
            EXPECT_LE(max_abs(D.block(b * 4 + n - 1, b * 4, 1, 4) - expect), 1e-8) << "block " << b << " node " << n;
        }
    }
    EXPECT_EQ(sched.decode_block.at(3), 1);
    EXPECT_EQ(sched.decode_block.at(4), 3);
    auto short_sched = ActivationSchedule::from_sets({{1}, {1, 3}});
    EXPECT_THROW(assemble(*t, x, Layout::ddf_patterned, p, &short_sched), ValidationError);
    EXPECT_THROW(assemble(*t, x, Layout::ddf_patterned, p), ValidationError);
}

TEST(Assemble, AlamoutiDdfRows)
{
    auto t = catalog_tower("sr-m3");
    Codebook book(t, 2, 2);
    CodeParams p = book.params(3);
    p.theta = 1.0;
    auto x = book.codeword(999);
    auto sched = ActivationSchedule::from_sets({{1}, {1}, {1, 2}});
    auto a = assemble(*t, x, Layout::alamouti_ddf, p, &sched);
    for (int b = 0; b < 3; ++b) {
        std::complex<double> l0 = t->embed(t->apply_phi(x.ell[0], b));
        std::complex<double> l1 = t->embed(t->apply_phi(x.ell[1], b));
        EXPECT_LE(std::abs(a.blocks[b](0, 0) - l0), kEps);
        EXPECT_LE(std::abs(a.blocks[b](0, 1) + std::conj(l1)), kEps);
        if (b == 2) {
            EXPECT_LE(std::abs(a.blocks[b](1, 0) - l1), kEps);
            EXPECT_LE(std::abs(a.blocks[b](1, 1) - std::conj(l0)), kEps);
        } else {
            EXPECT_EQ(max_abs(a.blocks[b].row(1)), 0.0);
        }
    }
}

TEST(Codebook, Counts)
{
    EXPECT_EQ(Codebook(catalog_tower("gi-m1-t2"), 2, 2).size(), 256u);
    EXPECT_EQ(Codebook(catalog_tower("sr-m3"), 2, 2).size(), 4096u);
    EXPECT_EQ(Codebook(catalog_tower("sr-m1"), 4, 2).size(), 256u);
    EXPECT_EQ(Codebook(catalog_tower("gi-m3-t2"), 2, 2).symbols(), 12u);
    EXPECT_THROW(enumerate_codebook(Codebook(catalog_tower("sr-m3"), 2, 2), 100), ResourceGuardError);
    EXPECT_EQ(enumerate_codebook(Codebook(catalog_tower("gi-m1-t2"), 2, 2), 1000).size(), 256u);
}

TEST(Codebook, IndexRoundTripAndRestriction)
{
    Codebook book(catalog_tower("sr-m3"), 4, 2);
    for (std::uint64_t i : std::vector<std::uint64_t>{0, 1, 4095, 123456, book.size() - 1})
        EXPECT_EQ(book.index_of(book.message(i)), i);
    Codebook sub(catalog_tower("sr-m3"), 2, 2, std::vector<std::size_t>{0, 4});
    EXPECT_EQ(sub.size(), 16u);
    auto msg = sub.message(5);
    for (std::size_t s : {1u, 2u, 3u, 5u})
        EXPECT_EQ(msg[s], sub.constellation().points[0]);
    EXPECT_EQ(sub.index_of(msg), 5u);
}

TEST(CodebookTable, MatchesExactConjugateBlocks)
{
    auto t = catalog_tower("sr-m3");
    Codebook book(t, 2, 2);
    CodebookTable table(book, 3, 1u << 16);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::uint64_t> pick(0, book.size() - 1);
    for (int k = 0; k < 50; ++k) {
        auto c = pick(rng);
        auto x = book.codeword(c);
        for (int b = 0; b < 3; ++b)
            EXPECT_LE(max_abs(table.block_matrix(c, b) - conjugate_block(*t, x, b, 2)), kEps);
    }
}

TEST(CodebookTable, AlamoutiOrthogonalityOnEveryCodeword)
{
    auto t = catalog_tower("sr-m3");
    Codebook book(t, 2, 2);
    CodebookTable table(book, 3, 1u << 16);
    double worst = 0;
    for (std::uint64_t c = 0; c < book.size(); ++c)
        for (int b = 0; b < 3; ++b) {
            Eigen::MatrixXcd X = table.block_matrix(c, b);
            const double e = X.row(0).squaredNorm();
            Eigen::MatrixXcd G = X * X.adjoint() - e * Eigen::MatrixXcd::Identity(2, 2);
            worst = std::max(worst, max_abs(G) / (1 + e));
        }
    EXPECT_LE(worst, kEps);
}

TEST(Nvd, AlamoutiMinimumIsSixteen)
{
    Codebook book(catalog_tower("sr-m1"), 2, 2);
    auto ex = nvd_min(book, {NvdMode::exhaustive});
    ASSERT_TRUE(ex.min_value);
    EXPECT_EQ(*ex.min_value, 16);
    EXPECT_EQ(ex.pairs_checked, 16u * 15u / 2u);
    // weight <= 2 differences cover all 9^2 - 1 nonzero differences here
    auto rs = nvd_min(book, {NvdMode::restricted, 0, 0, 1});
    EXPECT_EQ(rs.mode, "restricted");
    EXPECT_EQ(rs.pairs_checked, 80u);
    EXPECT_EQ(*rs.min_value, 16);
}

TEST(Nvd, IdenticalPairsAndEmptyCodebook)
{
    auto t = catalog_tower("sr-m1");
    Codebook book(t, 2, 2);
    std::vector<CodewordX> words{book.codeword(3), book.codeword(3)};
    auto c = nvd_min(std::span<const CodewordX>(words));
    EXPECT_FALSE(c.min_value);
    EXPECT_EQ(c.pairs_checked, 0u);
    EXPECT_TRUE(c.certified());
    EXPECT_EQ(c.min_string(), "inf");
    words.push_back(book.codeword(4));
    c = nvd_min(std::span<const CodewordX>(words));
    EXPECT_EQ(c.pairs_checked, 2u);
    EXPECT_GE(*c.min_value, 1);
}

TEST(Nvd, GaussianBaseTowersStayAboveOne)
{
    auto ex = nvd_min(Codebook(catalog_tower("gi-m1-t2"), 2, 2), {NvdMode::exhaustive});
    EXPECT_EQ(ex.pairs_checked, 256u * 255u / 2u);
    EXPECT_TRUE(ex.certified()) << ex.min_string();

    Codebook m2t3(catalog_tower("gi-m2-t3"), 2, 2, std::vector<std::size_t>{0, 7, 13});
    auto a = nvd_min(m2t3, {NvdMode::exhaustive});
    EXPECT_TRUE(a.certified()) << a.min_string();

    Codebook m5t4(catalog_tower("gi-m5-t4"), 2, 4, std::vector<std::size_t>{0, 21});
    auto b = nvd_min(m5t4, {NvdMode::exhaustive});
    EXPECT_EQ(b.pairs_checked, 120u);
    EXPECT_TRUE(b.certified()) << b.min_string();

    auto r = nvd_min(Codebook(catalog_tower("gi-m3-t2"), 2, 2), {NvdMode::restricted, 0, 200, 5});
    EXPECT_TRUE(r.certified()) << r.min_string();
}

TEST(Nvd, PairListAgreesWithCodebookScan)
{
    auto t = catalog_tower("gi-m1-t2");
    Codebook book(t, 2, 2);
    auto words = enumerate_codebook(book, 1000);
    auto a = nvd_min(std::span<const CodewordX>(words));
    auto b = nvd_min(book, {NvdMode::exhaustive});
    EXPECT_EQ(*a.min_value, *b.min_value);
}
