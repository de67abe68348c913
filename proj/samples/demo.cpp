// Builds the single-relay Alamouti DDF code, prints one codeword, certifies NVD on the
// m=1 Alamouti book, and runs a short curve.

#include <iostream>

#include "cdarelay/sim.hpp"

using namespace cdarelay;

int main()
{
    auto t = catalog_tower("sr-m3", 3);
    std::cout << t->id() << ": m=" << t->m() << " T=" << t->T() << " symbols=" << symbol_count(*t) << "\n";

    Codebook book(t, 2, 2);
    auto p = make_code_params(*t, 2, 3, 0.25, 1000.0, MPolicy::parse("fixed:2"), 3);
    std::cout << "codebook " << book.size() << " words, theta^2 = " << p.theta * p.theta << "\n";

    auto x = book.codeword(37);
    auto relay_late = ActivationSchedule::from_sets({{1}, {1}, {1, 2}});
    std::cout << "codeword 37, relay joining at block 3:\n"
              << assemble(*t, x, Layout::alamouti_ddf, p, &relay_late).matrix() << "\n";

    auto cert = nvd_min(Codebook(catalog_tower("sr-m1"), 2, 2));
    std::cout << "sr-m1 NVD min " << cert.min_string() << " over " << cert.pairs_checked << " pairs\n";

    ExperimentConfig cfg;
    cfg.scenario = Scenario::ddf_alamouti;
    cfg.B = 3;
    cfg.snr_db = {10, 20, 30};
    cfg.trials = 2000;
    auto pts = run_curve(cfg);
    write_csv(std::cout, pts);
}
