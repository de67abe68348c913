#ifndef CDARELAY_SIM_HPP
#define CDARELAY_SIM_HPP

#include <boost/math/distributions/beta.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cdarelay/channels.hpp"
#include "cdarelay/ddf.hpp"
#include "cdarelay/decode.hpp"
#include "cdarelay/error.hpp"
#include "cdarelay/fieldtower.hpp"
#include "cdarelay/stcode.hpp"

namespace cdarelay {

inline constexpr int kConfigVersion = 1;
inline constexpr std::uint64_t kDefaultCodebookLimit = 1u << 16;

enum class Scenario { block_fading, parallel, ofdm, ddf, ddf_alamouti };

inline const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::block_fading: return "block-fading";
    case Scenario::parallel: return "parallel";
    case Scenario::ofdm: return "ofdm";
    case Scenario::ddf: return "ddf";
    case Scenario::ddf_alamouti: return "ddf-alamouti";
    }
    return "?";
}

inline Scenario parse_scenario(const std::string& s)
{
    for (auto v : {Scenario::block_fading, Scenario::parallel, Scenario::ofdm, Scenario::ddf, Scenario::ddf_alamouti})
        if (s == to_string(v))
            return v;
    throw ValidationError("unknown scenario '" + s + "'");
}

inline bool is_ddf(Scenario s) { return s == Scenario::ddf || s == Scenario::ddf_alamouti; }

/// Which multiplexing gain a point is run at. `nominal` uses r as configured; `code` replaces it
/// per point with the gain the fixed codebook actually carries, bits / (T * rate_blocks * log2 rho).
enum class RateReference { nominal, code };

inline const char* to_string(RateReference r) { return r == RateReference::nominal ? "nominal" : "code"; }

inline RateReference parse_rate_reference(const std::string& s)
{
    if (s == "nominal")
        return RateReference::nominal;
    if (s == "code")
        return RateReference::code;
    throw ValidationError("rate reference must be 'nominal' or 'code', got '" + s + "'");
}

struct ExperimentConfig {
    Scenario scenario = Scenario::block_fading;
    std::string tower = "sr-m3";
    int n_t = 2;    // transmit rows; for DDF scenarios this is N (source plus relays)
    int n_r = 1;
    int B = 2;
    int L_taps = 1;  // OFDM only
    double r = 0.25;
    MPolicy m_policy{true, 2};
    RateReference rate_reference = RateReference::nominal;
    std::vector<double> snr_db{10, 15, 20};
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    FadingDistribution fading = FadingDistribution::rayleigh();
    std::optional<std::vector<std::size_t>> free_symbols;
    bool noiseless = false;
    std::uint64_t codebook_limit = kDefaultCodebookLimit;
    std::string out;

    int nodes() const { return n_t + 1; }

    int rate_blocks() const
    {
        return scenario == Scenario::parallel || scenario == Scenario::ofdm ? 1 : B;
    }

    void validate() const
    {
        if (trials < 1)
            throw ValidationError("trials must be at least 1");
        if (snr_db.empty())
            throw ValidationError("SNR grid is empty");
        for (std::size_t i = 1; i < snr_db.size(); ++i)
            if (!(snr_db[i] > snr_db[i - 1]))
                throw ValidationError("SNR grid must be strictly increasing");
        for (double db : snr_db)
            if (!(db > 0))
                throw ValidationError("SNR grid points must be above 0 dB");
        if (n_r < 1)
            throw ValidationError("n_r must be positive");
        if (r < 0)
            throw ValidationError("multiplexing gain r must be nonnegative");
        const auto t = catalog_tower(tower, B);
        if (n_t < 1 || n_t > t->T())
            throw ValidationError("need 1 <= n_t <= T");
        if (scenario == Scenario::ofdm && (L_taps < 1 || L_taps > B))
            throw ValidationError("OFDM needs 1 <= L_taps <= B");
        if (is_ddf(scenario) && n_r != 1)
            throw ValidationError("relay nodes have a single antenna");
        if (scenario == Scenario::ddf_alamouti && (t->T() != 2 || t->base() != BaseField::rationals || n_t != 2))
            throw ValidationError("ddf-alamouti needs a T = 2 tower over Q and one relay");
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["version"] = kConfigVersion;
    j["scenario"] = to_string(c.scenario);
    j["tower"] = c.tower;
    j["n_t"] = c.n_t;
    j["n_r"] = c.n_r;
    j["B"] = c.B;
    j["L_taps"] = c.L_taps;
    j["r"] = c.r;
    j["M_policy"] = c.m_policy.to_string();
    j["rate_reference"] = to_string(c.rate_reference);
    j["snr_db"] = c.snr_db;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["fading"] = c.fading.to_string();
    j["free_symbols"] = c.free_symbols ? nlohmann::json(*c.free_symbols) : nlohmann::json(nullptr);
    j["noiseless"] = c.noiseless;
    j["codebook_limit"] = c.codebook_limit;
    return j;
}

/// Missing keys keep their defaults. "nodes" (N + 1) may stand in for "n_t".
inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ValidationError("config must be a JSON object");
    ExperimentConfig c;
    try {
        if (j.contains("version") && j.at("version").get<int>() != kConfigVersion)
            throw ValidationError("unsupported config version " + j.at("version").dump());
        for (const auto& [key, _] : j.items()) {
            static const std::vector<std::string> known = {
                "version", "scenario", "tower", "n_t", "nodes", "n_r", "B", "L_taps", "r", "M_policy",
                "rate_reference", "snr_db", "trials", "seed", "fading", "free_symbols", "noiseless",
                "codebook_limit", "out"};
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw ValidationError("unknown config key '" + key + "'");
        }
        if (j.contains("scenario"))
            c.scenario = parse_scenario(j.at("scenario").get<std::string>());
        if (j.contains("tower"))
            c.tower = j.at("tower").get<std::string>();
        if (j.contains("n_t"))
            c.n_t = j.at("n_t").get<int>();
        if (j.contains("nodes"))
            c.n_t = j.at("nodes").get<int>() - 1;
        if (j.contains("n_r"))
            c.n_r = j.at("n_r").get<int>();
        if (j.contains("B"))
            c.B = j.at("B").get<int>();
        if (j.contains("L_taps"))
            c.L_taps = j.at("L_taps").get<int>();
        if (j.contains("r"))
            c.r = j.at("r").get<double>();
        if (j.contains("M_policy"))
            c.m_policy = MPolicy::parse(j.at("M_policy").get<std::string>());
        if (j.contains("rate_reference"))
            c.rate_reference = parse_rate_reference(j.at("rate_reference").get<std::string>());
        if (j.contains("snr_db"))
            c.snr_db = j.at("snr_db").get<std::vector<double>>();
        if (j.contains("trials")) {
            if (j.at("trials").is_number_integer() && j.at("trials").get<long long>() < 1)
                throw ValidationError("trials must be at least 1");
            c.trials = j.at("trials").get<std::uint64_t>();
        }
        if (j.contains("seed"))
            c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("fading"))
            c.fading = FadingDistribution::parse(j.at("fading").get<std::string>());
        if (j.contains("free_symbols") && !j.at("free_symbols").is_null())
            c.free_symbols = j.at("free_symbols").get<std::vector<std::size_t>>();
        if (j.contains("noiseless"))
            c.noiseless = j.at("noiseless").get<bool>();
        if (j.contains("codebook_limit"))
            c.codebook_limit = j.at("codebook_limit").get<std::uint64_t>();
        if (j.contains("out"))
            c.out = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad config value: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// binomial intervals

struct Interval {
    double lo = 0;
    double hi = 1;
    std::string method;
};

/// 95% interval for k successes in n: normal approximation, Clopper-Pearson when k or n - k < 30.
inline Interval binomial_interval(std::uint64_t k, std::uint64_t n, double level = 0.95)
{
    if (n == 0)
        throw ValidationError("binomial interval needs n >= 1");
    if (k > n)
        throw ValidationError("binomial interval needs k <= n");
    const double a = 1 - level;
    const double p = static_cast<double>(k) / static_cast<double>(n);
    Interval iv;
    if (k < 30 || n - k < 30) {
        iv.method = "clopper-pearson";
        const double kd = static_cast<double>(k), nd = static_cast<double>(n);
        iv.lo = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(kd, nd - kd + 1), a / 2);
        iv.hi = k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<double>(kd + 1, nd - kd), 1 - a / 2);
    } else {
        iv.method = "normal";
        const double z = 1.959963984540054;
        const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
        iv.lo = std::max(0.0, p - z * sd);
        iv.hi = std::min(1.0, p + z * sd);
    }
    return iv;
}

// ---------------------------------------------------------------------------
// curves

struct CurvePoint {
    double snr_db = 0;
    std::uint64_t trials = 0;
    double r = 0;  // gain actually used at this point
    int M = 2;
    std::uint64_t outage_events = 0;
    std::uint64_t error_events = 0;
    double outage_prob = 0;
    double coded_error_prob = 0;
    Interval outage_interval;
    Interval error_interval;
    // DDF scenarios
    std::uint64_t relay_decodes = 0;
    std::uint64_t relay_errors = 0;
    std::optional<double> conditional_relay_error;
    std::map<std::string, std::uint64_t> schedule_histogram;
    double wall_seconds = 0;  // reported, never written to result files
};

namespace detail {

struct Tally {
    std::uint64_t trials = 0, outage = 0, error = 0, relay_decodes = 0, relay_errors = 0;
    std::map<std::string, std::uint64_t> schedules;

    void merge(const Tally& o)
    {
        trials += o.trials;
        outage += o.outage;
        error += o.error;
        relay_decodes += o.relay_decodes;
        relay_errors += o.relay_errors;
        for (const auto& [k, v] : o.schedules)
            schedules[k] += v;
    }
};

/// Private stream for trial `trial` of grid point `point`.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t point, std::uint64_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(trial),
                      static_cast<std::uint32_t>(trial >> 32)};
    return Rng(seq);
}

inline double code_bits(const Codebook& book) { return book.size_log2(); }

} // namespace detail

/// Worker count from CDA_RELAY_WORKERS; results never depend on it.
inline unsigned worker_count()
{
    if (const char* env = std::getenv("CDA_RELAY_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            return static_cast<unsigned>(v);
        throw ValidationError("CDA_RELAY_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Gain a fixed codebook carries at SNR rho.
inline double code_rate_gain(const Codebook& book, int T, int rate_blocks, double rho)
{
    return detail::code_bits(book) / (T * rate_blocks * std::log2(rho));
}

/// Monte Carlo outage and coded error along the SNR grid. With `decode` off only outage is
/// estimated (coded error stays zero) and no codeword is sent.
inline std::vector<CurvePoint> run_curve(const ExperimentConfig& cfg, unsigned workers = 0, bool decode = true)
{
    cfg.validate();
    if (workers == 0)
        workers = worker_count();
    const auto tower = catalog_tower(cfg.tower, cfg.B);
    const int T = tower->T();
    const bool ddf = is_ddf(cfg.scenario);
    const int rb = cfg.rate_blocks();

    std::map<int, std::pair<std::unique_ptr<Codebook>, std::unique_ptr<CodebookTable>>> tables;
    auto table_for = [&](int M) -> std::pair<const Codebook*, const CodebookTable*> {
        auto it = tables.find(M);
        if (it == tables.end()) {
            auto book = std::make_unique<Codebook>(tower, M, cfg.n_t, cfg.free_symbols);
            book->guard(cfg.codebook_limit);
            auto table = std::make_unique<CodebookTable>(*book, cfg.B, cfg.codebook_limit);
            it = tables.emplace(M, std::make_pair(std::move(book), std::move(table))).first;
        }
        return {it->second.first.get(), it->second.second.get()};
    };

    std::vector<CurvePoint> points;
    for (std::size_t pi = 0; pi < cfg.snr_db.size(); ++pi) {
        const auto t0 = std::chrono::steady_clock::now();
        const double db = cfg.snr_db[pi];
        const double rho = std::pow(10.0, db / 10.0);
        CodeParams params = make_code_params(*tower, cfg.n_t, cfg.B, cfg.r, rho, cfg.m_policy, rb);
        const auto bt = table_for(params.M);
        const Codebook* book = bt.first;
        const CodebookTable* table = bt.second;
        if (cfg.rate_reference == RateReference::code)
            params = make_code_params(*tower, cfg.n_t, cfg.B, code_rate_gain(*book, T, rb, rho), rho,
                                      MPolicy{true, params.M}, rb);
        const std::uint64_t size = table->size();
        ChannelDims dims;
        dims.n_r = cfg.n_r;
        dims.n_t = cfg.n_t;
        dims.B = cfg.B;
        dims.L_taps = cfg.L_taps;
        dims.nodes = cfg.nodes();
        const ChannelKind kind = ddf ? ChannelKind::relay_network
                                 : cfg.scenario == Scenario::ofdm   ? ChannelKind::ofdm
                                 : cfg.scenario == Scenario::parallel ? ChannelKind::parallel
                                                                      : ChannelKind::block_fading;

        auto run_trial = [&](std::uint64_t trial, detail::Tally& tally) {
            Rng rng = detail::trial_rng(cfg.seed, pi, trial);
            const std::uint64_t message = std::uniform_int_distribution<std::uint64_t>(0, size - 1)(rng);
            const FadingRealization f = sample(kind, dims, cfg.fading, rng);
            ++tally.trials;
            if (ddf) {
                const auto s = compute_schedule(f, params.r, params.rho, cfg.B);
                ++tally.schedules[s.signature()];
                if (!decode) {
                    tally.outage += destination_outage(f, s, params.r, params.rho, cfg.B);
                    return;
                }
                const auto out = transmit_trial(message, f, s, params, *table, rng, {cfg.noiseless, {}});
                tally.outage += out.destination_in_outage;
                tally.error += out.scored_error;
                tally.relay_decodes += out.relay_decoded.size();
                tally.relay_errors += out.relay_decode_errors.size();
                return;
            }
            tally.outage += outage(f, params.r, params.rho, rb).in_outage;
            if (!decode)
                return;
            const EffectiveChannel eff(*table, f.matrices, params.theta);
            std::vector<cplx> y(eff.signal(message).begin(), eff.signal(message).end());
            if (!cfg.noiseless)
                for (auto& v : y)
                    v += FadingDistribution::cn(rng);
            tally.error += ml_decode(y, eff) != message;
        };

        // contiguous chunks claimed in order; integer tallies make the merge order-free
        const std::uint64_t chunk = 256;
        const std::uint64_t n_chunks = (cfg.trials + chunk - 1) / chunk;
        std::atomic<std::uint64_t> next{0};
        std::vector<detail::Tally> partial(workers);
        std::vector<std::exception_ptr> errors(workers);
        auto work = [&](unsigned w) {
            try {
                for (std::uint64_t c; (c = next.fetch_add(1)) < n_chunks;) {
                    const std::uint64_t end = std::min(cfg.trials, (c + 1) * chunk);
                    for (std::uint64_t k = c * chunk; k < end; ++k)
                        run_trial(k, partial[w]);
                }
            } catch (...) {
                errors[w] = std::current_exception();
                next = n_chunks;
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(work, w);
            for (auto& th : pool)
                th.join();
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        detail::Tally total;
        for (const auto& p : partial)
            total.merge(p);
        if (total.trials != cfg.trials)
            throw Error("trial accounting mismatch");

        CurvePoint pt;
        pt.snr_db = db;
        pt.trials = total.trials;
        pt.r = params.r;
        pt.M = params.M;
        pt.outage_events = total.outage;
        pt.error_events = total.error;
        pt.outage_prob = static_cast<double>(total.outage) / static_cast<double>(total.trials);
        pt.coded_error_prob = static_cast<double>(total.error) / static_cast<double>(total.trials);
        pt.outage_interval = binomial_interval(total.outage, total.trials);
        pt.error_interval = binomial_interval(total.error, total.trials);
        if (ddf) {
            pt.relay_decodes = total.relay_decodes;
            pt.relay_errors = total.relay_errors;
            if (total.relay_decodes > 0)
                pt.conditional_relay_error =
                    static_cast<double>(total.relay_errors) / static_cast<double>(total.relay_decodes);
            pt.schedule_histogram = std::move(total.schedules);
        }
        pt.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        points.push_back(std::move(pt));
    }
    return points;
}

// ---------------------------------------------------------------------------
// slopes

struct SlopePoint {
    double snr_db = 0;
    double prob = 0;
    std::uint64_t events = 0;
};

struct SlopeFit {
    double slope = 0;
    double std_error = 0;
    std::size_t points_used = 0;
};

inline std::vector<SlopePoint> outage_series(std::span<const CurvePoint> pts)
{
    std::vector<SlopePoint> v;
    for (const auto& p : pts)
        v.push_back({p.snr_db, p.outage_prob, p.outage_events});
    return v;
}

inline std::vector<SlopePoint> error_series(std::span<const CurvePoint> pts)
{
    std::vector<SlopePoint> v;
    for (const auto& p : pts)
        v.push_back({p.snr_db, p.coded_error_prob, p.error_events});
    return v;
}

/// d = -d log10(p) / d log10(rho), least squares over points in [lo_db, hi_db] with events.
inline SlopeFit fit_slope(std::span<const SlopePoint> pts, double lo_db = -1e300, double hi_db = 1e300)
{
    std::vector<double> x, y;
    for (const auto& p : pts)
        if (p.snr_db >= lo_db && p.snr_db <= hi_db && p.events > 0 && p.prob > 0) {
            x.push_back(p.snr_db / 10.0);
            y.push_back(std::log10(p.prob));
        }
    if (x.size() < 3)
        throw InsufficientEvents("slope fit needs at least 3 points with nonzero events in the window, got " +
                                 std::to_string(x.size()));
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxy / sxx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (my + b * (x[i] - mx));
        sse += e * e;
    }
    SlopeFit fit;
    fit.slope = -b;
    fit.std_error = std::sqrt(sse / (n - 2) / sxx);
    fit.points_used = x.size();
    return fit;
}

/// max over the shared grid of |log10 coded - log10 outage|, in decades.
inline double compare_exponents(std::span<const SlopePoint> outage_curve, std::span<const SlopePoint> coded_curve)
{
    if (outage_curve.size() != coded_curve.size())
        throw ValidationError("curves have different grid lengths");
    double gap = 0;
    for (std::size_t i = 0; i < outage_curve.size(); ++i) {
        if (outage_curve[i].snr_db != coded_curve[i].snr_db)
            throw ValidationError("curves are on different SNR grids");
        if (!(outage_curve[i].prob > 0) || !(coded_curve[i].prob > 0))
            throw InsufficientEvents("zero probability at " + std::to_string(outage_curve[i].snr_db) + " dB");
        gap = std::max(gap, std::abs(std::log10(coded_curve[i].prob) - std::log10(outage_curve[i].prob)));
    }
    return gap;
}

// ---------------------------------------------------------------------------
// output

inline std::string histogram_json(const std::map<std::string, std::uint64_t>& h)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : h)
        j[k] = v;
    return j.dump();
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, std::span<const CurvePoint> pts)
{
    os << "snr_db,trials,relay_activation_histogram,destination_outage_prob,scored_error_prob,"
          "outage_events,error_events,r,M,relay_decodes,relay_errors\n";
    for (const auto& p : pts) {
        std::string h = histogram_json(p.schedule_histogram);
        std::string quoted = "\"";
        for (char ch : h)
            quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        quoted += '"';
        os << format_double(p.snr_db) << ',' << p.trials << ',' << quoted << ',' << format_double(p.outage_prob) << ','
           << format_double(p.coded_error_prob) << ',' << p.outage_events << ',' << p.error_events << ','
           << format_double(p.r) << ',' << p.M << ',' << p.relay_decodes << ',' << p.relay_errors << '\n';
    }
}

inline nlohmann::json to_json(const Interval& iv) { return {{"lo", iv.lo}, {"hi", iv.hi}, {"method", iv.method}}; }

inline nlohmann::json sidecar_json(const ExperimentConfig& cfg, std::span<const CurvePoint> pts)
{
    nlohmann::json j;
    j["version"] = kConfigVersion;
    j["config"] = to_json(cfg);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) {
        nlohmann::json q;
        q["snr_db"] = p.snr_db;
        q["trials"] = p.trials;
        q["r"] = p.r;
        q["M"] = p.M;
        q["outage_events"] = p.outage_events;
        q["error_events"] = p.error_events;
        q["outage_prob"] = p.outage_prob;
        q["coded_error_prob"] = p.coded_error_prob;
        q["outage_interval"] = to_json(p.outage_interval);
        q["error_interval"] = to_json(p.error_interval);
        if (is_ddf(cfg.scenario)) {
            q["relay_decodes"] = p.relay_decodes;
            q["relay_errors"] = p.relay_errors;
            q["conditional_relay_error"] =
                p.conditional_relay_error ? nlohmann::json(*p.conditional_relay_error) : nlohmann::json(nullptr);
            q["schedule_histogram"] = nlohmann::json::parse(histogram_json(p.schedule_histogram));
        }
        arr.push_back(std::move(q));
    }
    j["points"] = std::move(arr);
    auto fit = [&](const std::vector<SlopePoint>& s) -> nlohmann::json {
        try {
            const auto f = fit_slope(s);
            return {{"slope", f.slope}, {"stderr", f.std_error}, {"points_used", f.points_used}};
        } catch (const InsufficientEvents&) {
            return nullptr;
        }
    };
    j["outage_slope"] = fit(outage_series(pts));
    j["error_slope"] = fit(error_series(pts));
    return j;
}

} // namespace cdarelay

#endif // CDARELAY_SIM_HPP
