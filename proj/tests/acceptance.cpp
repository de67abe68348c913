// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion ...]   (no arguments runs all ten)
//
// Tolerances and trial counts are fixed here and not configurable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cdarelay/sim.hpp"
#include "oracles.hpp"

using namespace cdarelay;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

// 1 -------------------------------------------------------------------------

Verdict nvd_certificate()
{
    NvdOptions opt;
    opt.mode = NvdMode::exhaustive;
    const auto cert = nvd_min(Codebook(catalog_tower("sr-m3"), 2, 2), opt);
    const bool big_ok = cert.pairs_checked == 4096ull * 4095 / 2 && cert.min_value && *cert.min_value >= 1;

    // |det|^2 of an Alamouti difference is (|dl0|^2 + |dl1|^2)^2; enumerate the QAM differences directly
    const auto q = qam(2);
    long oracle_min = -1;
    for (const auto& a0 : q.points)
        for (const auto& a1 : q.points)
            for (const auto& b0 : q.points)
                for (const auto& b1 : q.points) {
                    const long e = (a0 - b0).norm() + (a1 - b1).norm();
                    if (e > 0 && (oracle_min < 0 || e * e < oracle_min))
                        oracle_min = e * e;
                }
    const auto alamouti = nvd_min(Codebook(catalog_tower("sr-m1"), 2, 2), opt);
    const bool small_ok = alamouti.min_value && *alamouti.min_value == Rational(oracle_min) && oracle_min == 16;
    return {big_ok && small_ok, "sr-m3 M=2 exhaustive min=" + cert.min_string() + " over " +
                                    std::to_string(cert.pairs_checked) + " pairs; sr-m1 M=2 min=" +
                                    alamouti.min_string() + " (oracle " + std::to_string(oracle_min) + ")"};
}

// 2 -------------------------------------------------------------------------

Verdict galois_suite()
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> coef(-4, 4);
    int towers = 0, products = 0;
    std::string bad;
    for (const auto& id : catalog_ids()) {
        const auto t = catalog_tower(id);
        const bool ok = t->phi_matrix().pow(static_cast<unsigned>(t->m())).is_identity() &&
                        t->sigma_matrix().pow(static_cast<unsigned>(t->T())).is_identity() &&
                        t->phi_matrix() * t->sigma_matrix() == t->sigma_matrix() * t->phi_matrix();
        if (!ok)
            bad += " " + id + "(identities)";
        ++towers;
        for (int k = 0; k < 25; ++k) {
            FieldElement x = t->zero();
            for (std::size_t i = 0; i < t->degree(); ++i) {
                const FieldElement e = t->basis_element(i);
                if (t->in_K(e))
                    x += e.scaled(Rational(coef(rng)));
            }
            const FieldElement n = conjugate_norm_product(x);
            if (!t->in_base(n) || !n.is_integral()) {
                bad += " " + id + "(norm)";
                break;
            }
            ++products;
        }
    }
    return {bad.empty(), std::to_string(towers) + " towers, " + std::to_string(products) +
                             " integral K-element conjugate products" + (bad.empty() ? "" : "; failed:" + bad)};
}

// 3 -------------------------------------------------------------------------

Verdict siso_outage_oracle()
{
    int points = 0, misses = 0;
    double worst = 0;
    for (double r : {0.25, 0.5}) {
        ExperimentConfig c;
        c.tower = "sr-m1";
        c.n_t = 1;
        c.B = 1;
        c.r = r;
        c.snr_db = {10, 15, 20, 25, 30};
        c.trials = 100000;
        c.seed = r == 0.25 ? 301 : 302;
        for (const auto& p : run_curve(c, 0, false)) {
            const double q = oracle::rayleigh_siso_outage(std::pow(10.0, p.snr_db / 10), r);
            const double sd = std::sqrt(q * (1 - q) / static_cast<double>(p.trials));
            const double z = std::abs(p.outage_prob - q) / sd;
            worst = std::max(worst, z);
            misses += z > 3;
            ++points;
        }
    }
    return {misses == 0, std::to_string(points) + " points at 1e5 trials, worst deviation " + fmt(worst, 3) + " sigma"};
}

// 4 -------------------------------------------------------------------------

Verdict decoder_equivalence()
{
    struct Case {
        const char* tower;
        int M, n_t, n_r, B;
        double theta;
    };
    const std::vector<Case> cases{
        {"sr-m1", 2, 2, 1, 1, 3.0}, {"gi-m1-t2", 2, 2, 2, 1, 2.0}, {"sr-m3", 2, 2, 1, 2, 4.0}, {"sr-m3", 2, 2, 2, 3, 2.5}};
    Rng rng(404);
    int trials = 0, mismatches = 0;
    for (const auto& sc : cases) {
        const auto t = catalog_tower(sc.tower);
        Codebook book(t, sc.M, sc.n_t);
        CodebookTable table(book, sc.B, kDefaultCodebookLimit);
        CodeParams p = book.params(sc.B);
        p.theta = sc.theta;
        std::vector<Eigen::MatrixXcd> S_all;
        for (const auto& x : enumerate_codebook(book, kDefaultCodebookLimit))
            S_all.push_back(assemble(*t, x, Layout::block_diagonal, p).matrix());
        std::uniform_int_distribution<std::uint64_t> pick(0, book.size() - 1);
        for (int k = 0; k < 250; ++k, ++trials) {
            const auto f = sample(ChannelKind::block_fading, {sc.n_r, sc.n_t, sc.B}, FadingDistribution::rayleigh(), rng);
            const EffectiveChannel eff(table, f.matrices, sc.theta);
            const auto c = pick(rng);
            std::vector<cplx> y(eff.signal(c).begin(), eff.signal(c).end());
            for (auto& v : y)
                v += FadingDistribution::cn(rng);
            std::vector<Eigen::MatrixXcd> Y;
            for (int b = 0; b < sc.B; ++b) {
                Eigen::MatrixXcd Yb(sc.n_r, t->T());
                for (int i = 0; i < sc.n_r; ++i)
                    for (int col = 0; col < t->T(); ++col)
                        Yb(i, col) = y[static_cast<std::size_t>((b * sc.n_r + i) * t->T() + col)];
                Y.push_back(Yb);
            }
            mismatches += ml_decode(y, eff) != oracle::brute_force_decode(S_all, block_diagonal_channel(f), Y, sc.n_r, t->T());
        }
    }
    return {mismatches == 0 && trials == 1000,
            std::to_string(trials) + " trials over " + std::to_string(cases.size()) + " scenarios, " +
                std::to_string(mismatches) + " mismatches"};
}

// 5 -------------------------------------------------------------------------

Verdict bound_and_inclusion()
{
    const double tol = 1e-9;
    const auto t3 = catalog_tower("sr-m3");
    Codebook book(t3, 2, 2);
    std::mt19937_64 rng(505);
    Rng crng(506);
    std::uniform_int_distribution<std::size_t> pick(0, 3);
    int bound_violations = 0;
    for (int k = 0; k < 10000; ++k) {
        std::vector<GaussInt> d(book.symbols());
        bool nonzero = false;
        while (!nonzero)
            for (auto& z : d) {
                z = book.constellation().points[pick(rng)] - book.constellation().points[pick(rng)];
                nonzero = nonzero || !(z == GaussInt{0, 0});
            }
        CodewordX x;
        x.ell = message_elements(*t3, d);
        x.exact = regular_representation(*t3, x.ell);
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(4, 4);
        for (int b = 0; b < 2; ++b)
            D.block(2 * b, 2 * b, 2, 2) = conjugate_block(*t3, x, b, 2);
        const auto f = sample(ChannelKind::block_fading, {2, 2, 2}, FadingDistribution::rayleigh(), crng);
        const Eigen::MatrixXcd L = block_diagonal_channel(f);
        const double theta = 0.5 + (k % 7);
        const double exact = pairwise_distance_sq(D, Eigen::MatrixXcd::Zero(4, 4), L, theta);
        const double bound = mismatched_bound(channel_eigenvalues_asc(L), gram_eigenvalues_desc(D), theta);
        bound_violations += bound > exact * (1 + tol);
    }

    const auto t = catalog_tower("gi-m2-t3");
    Codebook gb(t, 2, 2);
    std::uniform_int_distribution<long> v(-2, 2);
    int inclusion_failures = 0;
    for (int k = 0; k < 10000; ++k) {
        std::vector<GaussInt> d(gb.symbols());
        for (auto& z : d)
            z = {2 * v(rng), 2 * v(rng)};
        const ExactMatrix X = regular_representation(*t, message_elements(*t, d));
        Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(6, 6), del = Eigen::MatrixXcd::Zero(4, 6);
        for (int b = 0; b < 2; ++b) {
            const Eigen::MatrixXcd blk = embed_rows(*t, apply_phi(*t, X, b), 3);
            full.block(3 * b, 3 * b, 3, 3) = blk;
            del.block(2 * b, 3 * b, 2, 3) = blk.topRows(2);
        }
        inclusion_failures += !inclusion_check(del, full, tol);
    }
    return {bound_violations == 0 && inclusion_failures == 0,
            "mismatched bound: " + std::to_string(bound_violations) + "/10000 violations; inclusion: " +
                std::to_string(inclusion_failures) + "/10000 failures"};
}

// 6 -------------------------------------------------------------------------

Verdict delta_j_certificate()
{
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const double eps = 0.1;
    const int B = 2, q = 4;
    int checked = 0, failures = 0;
    double worst = std::numeric_limits<double>::infinity();
    while (checked < 10000) {
        std::vector<double> a(q);
        for (auto& x : a)
            x = u(rng);
        std::sort(a.begin(), a.end(), std::greater<>());
        double pos = 0;
        for (double x : a)
            pos += std::max(0.0, 1 - x);
        const double r_max = pos / B - eps;
        if (r_max < 0)
            continue;
        const double r = std::uniform_real_distribution<double>(0.0, r_max)(rng);
        const double d = delta_J(a, designated_J(a), r, B);
        worst = std::min(worst, d);
        failures += d < eps * B - 1e-12;
        ++checked;
    }
    return {failures == 0,
            std::to_string(checked) + " vectors, min delta_J = " + fmt(worst) + " vs eps*B = " + fmt(eps * B)};
}

// 7, 8 ----------------------------------------------------------------------

ExperimentConfig alamouti_ddf(std::vector<double> grid, std::uint64_t trials, std::uint64_t seed)
{
    ExperimentConfig c;
    c.scenario = Scenario::ddf_alamouti;
    c.tower = "sr-m3";
    c.n_t = 2;
    c.B = 3;
    c.r = 0.25;
    c.m_policy = MPolicy::parse("fixed:2");
    c.snr_db = std::move(grid);
    c.trials = trials;
    c.seed = seed;
    return c;
}

Verdict relay_reliability()
{
    const auto p = run_curve(alamouti_ddf({30}, 20000, 707)).front();
    const double rate = p.conditional_relay_error.value_or(std::nan(""));
    const bool enough = p.relay_decodes >= 10000;
    return {enough && rate <= 1e-3,
            std::to_string(p.relay_errors) + " wrong of " + std::to_string(p.relay_decodes) +
                " relay decodes at 30 dB, rate " + fmt(rate) + " (limit 1e-3)"};
}

std::string slope_text(const std::vector<SlopePoint>& s, std::optional<SlopeFit>& fit)
{
    try {
        fit = fit_slope(s);
        return fmt(fit->slope, 3) + "+-" + fmt(fit->std_error, 2);
    } catch (const InsufficientEvents& e) {
        return std::string("n/a (") + e.what() + ")";
    }
}

Verdict dmt_proxy()
{
    const auto pts = run_curve(alamouti_ddf({20, 24, 28}, 1000000, 808));
    const auto o = outage_series(pts), e = error_series(pts);
    std::string detail;
    double gap = std::numeric_limits<double>::infinity();
    try {
        gap = compare_exponents(o, e);
    } catch (const InsufficientEvents&) {
    }
    for (const auto& p : pts)
        detail += fmt(p.snr_db, 3) + "dB out=" + fmt(p.outage_prob, 3) + " err=" + fmt(p.coded_error_prob, 3) + "; ";
    std::optional<SlopeFit> fo, fe;
    detail += "slopes outage " + slope_text(o, fo) + " error " + slope_text(e, fe);
    const bool slopes_ok = fo && fe && std::abs(fo->slope - fe->slope) <= 0.3;
    detail += "; max gap " + fmt(gap, 3) + " decades (limit 0.5)";
    return {gap <= 0.5 && slopes_ok, detail};
}

// 9 -------------------------------------------------------------------------

Verdict universality()
{
    bool pass = true;
    std::string detail;
    for (const auto& dist : {FadingDistribution::rician(5), FadingDistribution::nakagami(2)}) {
        ExperimentConfig c;
        c.scenario = Scenario::block_fading;
        c.tower = "sr-m3";
        c.n_t = 2;
        c.n_r = 1;
        c.B = 2;
        c.m_policy = MPolicy::parse("fixed:2");
        c.rate_reference = RateReference::code;
        c.snr_db = {10, 13, 16, 19};
        c.trials = 500000;
        c.fading = dist;
        c.seed = 909;
        const auto pts = run_curve(c);
        std::optional<SlopeFit> fo, fe;
        const std::string so = slope_text(outage_series(pts), fo), se = slope_text(error_series(pts), fe);
        const bool ok = fo && fe && std::abs(fo->slope - fe->slope) <= 0.3;
        pass = pass && ok;
        detail += dist.to_string() + ": outage " + so + " error " + se + (ok ? " ok" : " mismatch") + "; ";
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

// 10 ------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Verdict cli_determinism()
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("cdarelay-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "ddf.json");
        cfg << R"({"version": 1, "scenario": "ddf-alamouti", "B": 3, "r": 0.25, "M_policy": "fixed:2",
                  "snr_db": [12, 18, 24], "trials": 3000, "fading": "rician:5"})";
    }
    const std::string cli = CDARELAY_CLI_PATH;
    const std::vector<std::string> runs{
        "simulate --config " + (dir / "ddf.json").string() + " --seed 17",
        "dmt --scenario block-fading --B 2 --rate-reference code --snr-db-grid 8,11,14 --trials 4000 --seed 5",
        "outage --scenario ofdm --B 2 --L-taps 2 --n-r 2 --snr-db-grid 5,10,15 --trials 20000 --seed 9",
        "nvd-check --tower gi-m1-t2 --M 2 --seed 3",
        "construct --tower gi-m2-t3 --B 2 --sample 3 --seed 4",
    };
    int compared = 0, differing = 0, failed = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        std::vector<std::string> outputs;
        for (int workers : {1, 3, 1}) {
            const fs::path out = dir / ("run" + std::to_string(k) + "-" + std::to_string(outputs.size()) + ".out");
            const std::string cmd = "CDA_RELAY_WORKERS=" + std::to_string(workers) + " " + cli + " " + runs[k] +
                                    " --out " + out.string() + " 2>/dev/null";
            if (std::system(cmd.c_str()) != 0) {
                ++failed;
                break;
            }
            std::string bytes = slurp(out);
            if (fs::exists(out.string() + ".json"))
                bytes += slurp(out.string() + ".json");
            outputs.push_back(std::move(bytes));
        }
        for (std::size_t i = 1; i < outputs.size(); ++i) {
            ++compared;
            differing += outputs[i] != outputs[0] || outputs[0].empty();
        }
    }
    fs::remove_all(dir);
    return {failed == 0 && differing == 0 && compared == 2 * static_cast<int>(runs.size()),
            std::to_string(runs.size()) + " commands x 3 runs (workers 1/3/1): " + std::to_string(differing) +
                " differing, " + std::to_string(failed) + " failed"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"NVD certificate", nvd_certificate},
        {"Galois/algebra suite", galois_suite},
        {"Rayleigh SISO outage oracle", siso_outage_oracle},
        {"decoder oracle equivalence", decoder_equivalence},
        {"mismatched bound and inclusion principle", bound_and_inclusion},
        {"delta_J certificate", delta_j_certificate},
        {"conditional relay reliability", relay_reliability},
        {"DMT proxy (error vs outage)", dmt_proxy},
        {"approximate universality", universality},
        {"CLI determinism", cli_determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!selected.empty() && !selected.count(id))
            continue;
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << id << " " << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
