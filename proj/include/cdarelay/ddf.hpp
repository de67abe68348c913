#ifndef CDARELAY_DDF_HPP
#define CDARELAY_DDF_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "cdarelay/channels.hpp"
#include "cdarelay/decode.hpp"
#include "cdarelay/error.hpp"
#include "cdarelay/schedule.hpp"
#include "cdarelay/stcode.hpp"

namespace cdarelay {

/// Sum over blocks 1..k of |h_j(n)|^2 under the extended vectors.
inline double accumulated_gain(const FadingRealization& f, const ActivationSchedule& s, int n, int k)
{
    double acc = 0;
    for (const auto& v : relay_channel_view(f, s, n, k))
        acc += v.squaredNorm();
    return acc;
}

/// Relay n after hearing blocks 1..heard: log2(1 + rho sum |h_l(n)|^2) < (r B / heard) log2 rho.
inline bool relay_outage_test(int n, int heard, const FadingRealization& f, const ActivationSchedule& so_far, double r,
                              double rho, int B)
{
    if (heard < 1 || heard > B)
        throw ValidationError("relay outage test needs 1 <= b-1 <= B");
    const double mi = std::log2(1.0 + rho * accumulated_gain(f, so_far, n, heard));
    return mi < (r * B / heard) * std::log2(rho);
}

/// Activation sets from relay outage decisions at each block boundary. Nodes 1..N transmit;
/// node N+1 is the destination.
inline ActivationSchedule compute_schedule(const FadingRealization& f, double r, double rho, int B)
{
    if (f.kind != ChannelKind::relay_network)
        throw ValidationError("compute_schedule needs a relay-network realization");
    if (B < 1)
        throw ValidationError("block count must be positive");
    const int N = f.nodes - 1;
    ActivationSchedule s;
    s.sets.push_back({1});
    for (int b = 1; b < B; ++b) {
        std::set<int> next = s.sets.back();
        for (int n = 2; n <= N; ++n)
            if (!next.count(n) && !relay_outage_test(n, b, f, s, r, rho, B)) {
                next.insert(n);
                s.decode_block[n] = b;
            }
        s.sets.push_back(std::move(next));
    }
    return s;
}

/// sum_b log2(1 + rho |h_b(N+1)|^2) < r B log2 rho.
inline bool destination_outage(const FadingRealization& f, const ActivationSchedule& s, double r, double rho, int B)
{
    const int dest = f.nodes;
    double mi = 0;
    for (const auto& v : relay_channel_view(f, s, dest, B))
        mi += std::log2(1.0 + rho * v.squaredNorm());
    return mi < r * B * std::log2(rho);
}

/// Per-block 1 x N gains seen by node n over blocks 1..k.
inline std::vector<Eigen::MatrixXcd> view_gains(const FadingRealization& f, const ActivationSchedule& s, int n, int k)
{
    std::vector<Eigen::MatrixXcd> g;
    for (const auto& v : relay_channel_view(f, s, n, k))
        g.push_back(v.transpose());
    return g;
}

struct TrialOutcome {
    ActivationSchedule schedule;
    std::map<int, std::uint64_t> relay_decoded;  // relay -> codeword index it decoded
    std::set<int> relay_decode_errors;
    bool destination_in_outage = false;
    std::uint64_t destination_decoded = 0;
    bool destination_decode_error = false;
    bool scored_error = false;
};

struct TrialOptions {
    bool noiseless = false;
    std::map<int, std::uint64_t> forced_relay_decodes;  // test hook: relay -> index it "decodes"
};

/// One DDF transmission of codeword `message` over `f` with the given schedule.
/// Active nodes send their rows of phi^(k-1)(X) for the codeword they hold; a relay that
/// decoded wrongly sends its wrong codeword. The destination decodes with the schedule known.
inline TrialOutcome transmit_trial(std::uint64_t message, const FadingRealization& f, const ActivationSchedule& s,
                                   const CodeParams& params, const CodebookTable& table, Rng& rng,
                                   const TrialOptions& opt = {})
{
    const int N = f.nodes - 1;
    const int B = params.B;
    const int T = table.T();
    if (table.n_t() != N || s.blocks() != B || table.B() < B)
        throw ValidationError("codebook rows, schedule and block count must match the relay network");
    s.validate(N);
    TrialOutcome out;
    out.schedule = s;

    // held[n] = codeword node n transmits once active
    std::vector<std::uint64_t> held(static_cast<std::size_t>(N + 1), message);
    // received[j] = concatenated blocks heard by node j (2..N+1), filled lazily per block
    std::vector<std::vector<cplx>> received(static_cast<std::size_t>(N + 2));

    auto receive_block = [&](int j, int k) {
        auto& y = received[static_cast<std::size_t>(j)];
        const std::size_t off = y.size();
        y.resize(off + static_cast<std::size_t>(T), cplx(0.0, 0.0));
        for (int n : s.sets[static_cast<std::size_t>(k - 1)])
            if (n != j)
                accumulate_row_signal(table, held[static_cast<std::size_t>(n)], k - 1, n - 1, f.h(n, j), params.theta,
                                      &y[off]);
        if (!opt.noiseless)
            for (int t = 0; t < T; ++t)
                y[off + static_cast<std::size_t>(t)] += FadingDistribution::cn(rng);
    };

    for (int k = 1; k <= B; ++k) {
        // relays that decoded after block k-1 switch to their decoded codeword before block k
        if (k >= 2)
            for (const auto& [n, b] : s.decode_block)
                if (b == k - 1) {
                    std::uint64_t d;
                    if (auto it = opt.forced_relay_decodes.find(n); it != opt.forced_relay_decodes.end()) {
                        d = it->second;
                    } else {
                        EffectiveChannel eff(table, view_gains(f, s, n, b), params.theta);
                        d = ml_decode(received[static_cast<std::size_t>(n)], eff);
                    }
                    held[static_cast<std::size_t>(n)] = d;
                    out.relay_decoded[n] = d;
                    if (d != message)
                        out.relay_decode_errors.insert(n);
                }
        for (int j = 2; j <= N + 1; ++j)
            if (j == N + 1 || !s.active(j, k))
                receive_block(j, k);
    }

    EffectiveChannel eff(table, view_gains(f, s, N + 1, B), params.theta);
    out.destination_decoded = ml_decode(received[static_cast<std::size_t>(N + 1)], eff);
    out.destination_decode_error = out.destination_decoded != message;
    out.destination_in_outage = destination_outage(f, s, params.r, params.rho, B);
    out.scored_error = out.destination_decode_error || !out.relay_decode_errors.empty();
    return out;
}

} // namespace cdarelay

#endif // CDARELAY_DDF_HPP
