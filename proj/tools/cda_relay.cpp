// cda-relay: command-line front end for code construction, NVD certificates and curve runs.
//
// Exit codes: 0 success, 2 validation error, 3 resource-guard refusal, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdarelay/serialize.hpp"
#include "cdarelay/sim.hpp"

using namespace cdarelay;

namespace {

struct CommonFlags {
    std::string config;
    std::uint64_t seed = 1;
    std::string out;
};

struct CurveFlags {
    std::string scenario, tower, m_policy, rate_reference, fading, grid;
    int nodes = 0, n_t = 0, n_r = 0, T = 0, B = 0, L_taps = 0;
    double r = 0;
    std::uint64_t trials = 0, codebook_limit = 0;
    bool noiseless = false;
};

std::vector<double> parse_grid(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("bad SNR grid entry '" + item + "'");
        }
    }
    return out;
}

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write '" + path + "'");
    f << text;
}

/// --out names the CSV; the JSON sidecar sits next to it. Without --out the sidecar goes to stdout.
void emit_curve(const CommonFlags& common, const std::string& csv, const nlohmann::json& sidecar)
{
    if (common.out.empty()) {
        std::cout << sidecar.dump(2) << "\n";
        return;
    }
    write_text(common.out, csv);
    write_text(common.out + ".json", sidecar.dump(2) + "\n");
}

void add_curve_flags(CLI::App* cmd, CurveFlags& f)
{
    cmd->add_option("--scenario", f.scenario, "block-fading | parallel | ofdm | ddf | ddf-alamouti");
    cmd->add_option("--tower", f.tower, "tower catalog id");
    cmd->add_option("--nodes", f.nodes, "relay network size N+1 (DDF scenarios)");
    cmd->add_option("--n-t", f.n_t, "transmit rows");
    cmd->add_option("--n-r", f.n_r, "receive antennas");
    cmd->add_option("--T", f.T, "code length T (checked against the tower)");
    cmd->add_option("--B", f.B, "blocks / sub-channels / OFDM tones");
    cmd->add_option("--L-taps", f.L_taps, "OFDM channel taps");
    cmd->add_option("--r", f.r, "multiplexing gain");
    cmd->add_option("--snr-db-grid", f.grid, "comma-separated SNR points in dB");
    cmd->add_option("--trials", f.trials, "trials per SNR point");
    cmd->add_option("--M-policy", f.m_policy, "auto | fixed:M");
    cmd->add_option("--rate-reference", f.rate_reference, "nominal | code");
    cmd->add_option("--fading", f.fading, "rayleigh | rician:K | nakagami:m");
    cmd->add_option("--codebook-limit", f.codebook_limit, "largest codebook a curve may enumerate");
    cmd->add_flag("--noiseless", f.noiseless, "drop receiver noise");
}

ExperimentConfig build_config(const CLI::App* cmd, const CommonFlags& common, const CurveFlags& f)
{
    ExperimentConfig c = common.config.empty() ? ExperimentConfig{} : config_from_json(read_json_file(common.config));
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--scenario"))
        c.scenario = parse_scenario(f.scenario);
    if (given("--tower"))
        c.tower = f.tower;
    if (given("--n-t"))
        c.n_t = f.n_t;
    if (given("--nodes"))
        c.n_t = f.nodes - 1;
    if (given("--n-r"))
        c.n_r = f.n_r;
    if (given("--B"))
        c.B = f.B;
    if (given("--L-taps"))
        c.L_taps = f.L_taps;
    if (given("--r"))
        c.r = f.r;
    if (given("--snr-db-grid"))
        c.snr_db = parse_grid(f.grid);
    if (given("--trials"))
        c.trials = f.trials;
    if (given("--M-policy"))
        c.m_policy = MPolicy::parse(f.m_policy);
    if (given("--rate-reference"))
        c.rate_reference = parse_rate_reference(f.rate_reference);
    if (given("--fading"))
        c.fading = FadingDistribution::parse(f.fading);
    if (given("--codebook-limit"))
        c.codebook_limit = f.codebook_limit;
    if (given("--noiseless"))
        c.noiseless = true;
    if (given("--seed"))
        c.seed = common.seed;
    c.validate();
    if (given("--T") && f.T != catalog_tower(c.tower, c.B)->T())
        throw ValidationError("tower " + c.tower + " has T=" + std::to_string(catalog_tower(c.tower)->T()) +
                              ", not " + std::to_string(f.T));
    return c;
}

void report_times(const std::vector<CurvePoint>& pts)
{
    for (const auto& p : pts)
        std::cerr << "snr " << p.snr_db << " dB: " << p.trials << " trials in " << p.wall_seconds << " s\n";
}

std::string csv_text(const std::vector<CurvePoint>& pts)
{
    std::ostringstream os;
    write_csv(os, pts);
    return os.str();
}

std::string outage_csv_text(const std::vector<CurvePoint>& pts)
{
    std::ostringstream os;
    os << "snr_db,trials,outage_events,destination_outage_prob,interval_lo,interval_hi,r\n";
    for (const auto& p : pts)
        os << format_double(p.snr_db) << ',' << p.trials << ',' << p.outage_events << ','
           << format_double(p.outage_prob) << ',' << format_double(p.outage_interval.lo) << ','
           << format_double(p.outage_interval.hi) << ',' << format_double(p.r) << '\n';
    return os.str();
}

nlohmann::json slope_json(const std::vector<SlopePoint>& s)
{
    try {
        const auto f = fit_slope(s);
        return {{"slope", f.slope}, {"stderr", f.std_error}, {"points_used", f.points_used}};
    } catch (const InsufficientEvents& e) {
        return {{"error", e.what()}};
    }
}

int run_construct(const std::string& tower_id, int T, int m, int B, int M, int n_t, const std::string& layout,
                  std::uint64_t sample, bool full, const CommonFlags& common, const CLI::App* cmd)
{
    const auto t = catalog_tower(tower_id, B);
    if (cmd->count("--T") && T != t->T())
        throw ValidationError("tower " + tower_id + " has T=" + std::to_string(t->T()));
    if (cmd->count("--m") && m != t->m())
        throw ValidationError("tower " + tower_id + " has m=" + std::to_string(t->m()));
    const int rows = cmd->count("--n-t") ? n_t : t->T();
    Codebook book(t, M, rows);
    CodeParams p = make_code_params(*t, rows, B, 0.0, 2.0, MPolicy{true, M}, B);
    p.theta = 1.0;
    const Layout lay = parse_layout(layout);

    std::vector<std::uint64_t> indices;
    if (full) {
        book.guard(kDefaultCodebookLimit);
        for (std::uint64_t i = 0; i < book.size(); ++i)
            indices.push_back(i);
    } else {
        Rng rng(common.seed);
        std::vector<GaussInt> msg(book.symbols());
        std::uniform_int_distribution<std::size_t> pick(0, book.constellation().size() - 1);
        for (std::uint64_t k = 0; k < sample; ++k) {
            for (auto& g : msg)
                g = book.constellation().points[pick(rng)];
            if (book.size_log2() > 62)
                throw ResourceGuardError("codebook too large to index; use a smaller M or tower");
            indices.push_back(book.index_of(msg));
        }
    }

    nlohmann::json j;
    j["tower"] = tower_json(*t);
    j["params"] = {{"n_t", rows}, {"T", t->T()}, {"B", B}, {"m", t->m()}, {"M", M}, {"layout", to_string(lay)},
                   {"theta", 1.0}};
    j["symbols"] = book.symbols();
    j["codebook_size_log2"] = book.size_log2();
    nlohmann::json words = nlohmann::json::array();
    for (auto idx : indices) {
        const auto x = book.codeword(idx);
        words.push_back(codeword_json(book, idx, assemble(*t, x, lay, p)));
    }
    j["codewords"] = std::move(words);
    write_text(common.out, j.dump(2) + "\n");
    return 0;
}

int run_nvd(const std::string& tower_id, int M, int n_t, const std::string& mode, std::uint64_t random_pairs,
            std::uint64_t pair_limit, const CommonFlags& common, const CLI::App* cmd)
{
    const auto t = catalog_tower(tower_id);
    Codebook book(t, M, cmd->count("--n-t") ? n_t : t->T());
    NvdOptions opt;
    if (mode == "auto")
        opt.mode = NvdMode::automatic;
    else if (mode == "exhaustive")
        opt.mode = NvdMode::exhaustive;
    else if (mode == "restricted")
        opt.mode = NvdMode::restricted;
    else
        throw ValidationError("mode must be auto, exhaustive or restricted");
    opt.random_pairs = random_pairs;
    opt.exhaustive_pair_limit = pair_limit;
    opt.seed = common.seed;
    const auto cert = nvd_min(book, opt);
    nlohmann::json j = to_json(cert);
    j["tower"] = t->id();
    j["M"] = M;
    write_text(common.out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cyclic-division-algebra space-time codes over block-fading and DDF relay channels"};
    app.require_subcommand(1);
    CommonFlags common;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config, "JSON config file; flags override its values");
        cmd->add_option("--seed", common.seed, "64-bit seed");
        cmd->add_option("--out", common.out, "output path (stdout when omitted)");
    };

    auto* construct = app.add_subcommand("construct", "emit codewords with exact and embedded entries");
    add_common(construct);
    std::string c_tower = "sr-m3", c_layout = "block-diagonal";
    int c_T = 2, c_m = 1, c_B = 1, c_M = 2, c_nt = 2;
    std::uint64_t c_sample = 4;
    bool c_full = false;
    construct->add_option("--tower", c_tower, "tower catalog id");
    construct->add_option("--T", c_T, "code length (checked)");
    construct->add_option("--m", c_m, "degree of K (checked)");
    construct->add_option("--B", c_B, "blocks");
    construct->add_option("--M", c_M, "QAM side");
    construct->add_option("--n-t", c_nt, "transmit rows (default T)");
    construct->add_option("--layout", c_layout, "block-diagonal | stacked");
    construct->add_option("--sample", c_sample, "number of random codewords to emit");
    construct->add_flag("--full", c_full, "emit the whole codebook");

    auto* nvd = app.add_subcommand("nvd-check", "exact minimum of the conjugate determinant product");
    add_common(nvd);
    std::string n_tower = "sr-m3", n_mode = "auto";
    int n_M = 2, n_nt = 2;
    std::uint64_t n_random = 1'000'000, n_limit = 10'000'000;
    nvd->add_option("--tower", n_tower, "tower catalog id");
    nvd->add_option("--M", n_M, "QAM side");
    nvd->add_option("--n-t", n_nt, "codeword rows (default T)");
    nvd->add_option("--mode", n_mode, "auto | exhaustive | restricted");
    nvd->add_option("--random-pairs", n_random, "random pairs in restricted mode");
    nvd->add_option("--pair-limit", n_limit, "largest pair count auto mode checks exhaustively");

    CurveFlags curve;
    auto* outage_cmd = app.add_subcommand("outage", "Monte Carlo outage curve");
    auto* simulate = app.add_subcommand("simulate", "outage and coded error curve");
    auto* dmt = app.add_subcommand("dmt", "curve plus fitted diversity slopes and outage gap");
    for (auto* cmd : {outage_cmd, simulate, dmt}) {
        add_common(cmd);
        add_curve_flags(cmd, curve);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (construct->parsed())
            return run_construct(c_tower, c_T, c_m, c_B, c_M, c_nt, c_layout, c_sample, c_full, common, construct);
        if (nvd->parsed())
            return run_nvd(n_tower, n_M, n_nt, n_mode, n_random, n_limit, common, nvd);

        CLI::App* cmd = outage_cmd->parsed() ? outage_cmd : simulate->parsed() ? simulate : dmt;
        const ExperimentConfig cfg = build_config(cmd, common, curve);
        if (cmd == outage_cmd) {
            const auto pts = run_curve(cfg, 0, false);
            report_times(pts);
            nlohmann::json j;
            j["config"] = to_json(cfg);
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& p : pts)
                arr.push_back({{"snr_db", p.snr_db},
                               {"trials", p.trials},
                               {"r", p.r},
                               {"outage_events", p.outage_events},
                               {"outage_prob", p.outage_prob},
                               {"outage_interval", to_json(p.outage_interval)}});
            j["points"] = std::move(arr);
            j["outage_slope"] = slope_json(outage_series(pts));
            emit_curve(common, outage_csv_text(pts), j);
            return 0;
        }
        const auto pts = run_curve(cfg);
        report_times(pts);
        nlohmann::json j = sidecar_json(cfg, pts);
        if (cmd == dmt) {
            const auto o = outage_series(pts), e = error_series(pts);
            j["outage_slope"] = slope_json(o);
            j["error_slope"] = slope_json(e);
            if (j["outage_slope"].contains("slope") && j["error_slope"].contains("slope"))
                j["slope_difference"] = j["error_slope"]["slope"].get<double>() - j["outage_slope"]["slope"].get<double>();
            try {
                j["gap_decades"] = compare_exponents(o, e);
            } catch (const InsufficientEvents& ex) {
                j["gap_decades"] = nullptr;
                j["gap_error"] = ex.what();
            }
        }
        emit_curve(common, csv_text(pts), j);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceGuardError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
