// Acceptance suite: one criterion per command-line argument (1..9, or
// "all"). Prints one [PASS]/[FAIL] line per criterion with per-check detail
// and exits nonzero if any requested criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "corelay/analysis.hpp"
#include "corelay/channel.hpp"
#include "corelay/rng.hpp"
#include "corelay/sim.hpp"
#include "corelay/sweep.hpp"

using namespace corelay;

namespace {

int g_checks_failed = 0;

void detail(bool ok, const char* fmt, ...) {
    if (!ok) ++g_checks_failed;
    va_list args;
    va_start(args, fmt);
    std::printf("  %s ", ok ? "-" : "! FAIL:");
    std::vprintf(fmt, args);
    std::printf("\n");
    va_end(args);
}

void verdict(int criterion, bool pass, const char* title) {
    std::printf("[%s] C%d %s\n", pass ? "PASS" : "FAIL", criterion, title);
}

ValidatedConfig make(Protocol p, int n, int n_r) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.protocol = p;
    cfg.n_sensors = n;
    cfg.n_r = n_r;
    return validate_config(cfg).value();
}

struct PooledPoint {
    double mlr = 0.0;
    double se = 0.0;
    double rdc = 0.0;
};

PooledPoint pooled(Protocol p, int n, int n_r, int seeds, std::int64_t slots,
                   std::uint64_t seed_base) {
    const ValidatedConfig cfg = make(p, n, n_r);
    std::vector<double> mlrs;
    long long lost = 0, total = 0;
    PooledPoint out;
    for (int r = 0; r < seeds; ++r) {
        Simulator sim(cfg, RngStream::mix(seed_base, r + 1));
        const RunMetrics m = sim.run(slots);
        lost += m.lost;
        total += m.messages_generated;
        out.rdc += m.rdc_estimate / seeds;
        mlrs.push_back(m.mlr_estimate);
    }
    out.mlr = static_cast<double>(lost) / total;
    if (mlrs.size() >= 2) {
        double mean = 0.0;
        for (double v : mlrs) mean += v;
        mean /= mlrs.size();
        double var = 0.0;
        for (double v : mlrs) var += (v - mean) * (v - mean);
        out.se = std::sqrt(var / (mlrs.size() - 1) / mlrs.size());
    }
    return out;
}

// ---------------------------------------------------------------------------

bool criterion1() {
    std::puts("C1: analysis vs simulation on the 9-point grid, both protocols");
    const ScenarioConfig base = ScenarioConfig::defaults();
    const ValidateReport report = run_validation(
        base, base, {10, 20, 40}, {1, 5, 11},
        {Protocol::SingleRelayCoded, Protocol::Cooperative}, 1000000, 424242);
    bool pass = true;
    for (const ValidatePoint& pt : report.points) {
        const bool ok = pt.status == "pass";
        if (!ok) pass = false;
        detail(ok,
               "%-18s n=%2d n_r=%2d mlr ana=%.4f sim=%.4f (tol %.4f) %s | "
               "rdc ana=%.4f sim=%.4f rel=%.1f%% %s",
               protocol_name(pt.protocol), pt.n_sensors, pt.n_r, pt.mlr_ana, pt.mlr_sim,
               pt.mlr_tol, pt.mlr_pass ? "ok" : "MISS", pt.rdc_ana, pt.rdc_sim,
               100.0 * pt.rdc_rel_err, pt.rdc_pass ? "ok" : "MISS");
    }
    verdict(1, pass, "cross-validation |mlr| <= max(0.015, 4se), |rdc| rel <= 3%");
    return pass;
}

bool criterion2() {
    std::puts("C2: loss ordering vs the baselines across n_r = 3..15 (20 sensors)");
    SweepSpec spec;
    spec.base = ScenarioConfig::defaults();
    spec.axis = SweepAxis::NR;
    for (int v = 3; v <= 15; ++v) spec.values.push_back(v);
    spec.protocols = {Protocol::NoRelay, Protocol::ImmediateForwarding,
                      Protocol::UncodedForwarding, Protocol::SingleRelayCoded};
    spec.replications = 5;
    spec.slots = 300000;
    spec.seed_base = 1001;
    const auto rows = run_sweep(spec);
    const std::size_t nv = spec.values.size();
    auto mlr_of = [&](std::size_t proto_idx, std::size_t value_idx) {
        return *rows[proto_idx * nv + value_idx].mlr_sim;
    };

    bool pass = true;
    // no-relay and immediate rows are flat in n_r
    for (std::size_t p : {std::size_t{0}, std::size_t{1}}) {
        bool flat = true;
        for (std::size_t v = 1; v < nv; ++v)
            if (mlr_of(p, v) != mlr_of(p, 0)) flat = false;
        if (!flat) pass = false;
        detail(flat, "%s loss is constant in n_r (%.4f)",
               protocol_name(spec.protocols[p]), mlr_of(p, 0));
    }
    for (std::size_t v = 0; v < nv; ++v) {
        const double nr_mlr = mlr_of(0, v), unc = mlr_of(2, v), cod = mlr_of(3, v);
        const bool order1 = nr_mlr > unc;
        const bool order2 = unc > cod;
        if (!order1 || !order2) pass = false;
        detail(order1 && order2,
               "n_r=%2zu no-relay %.4f > uncoded %.4f > coded %.4f%s",
               static_cast<std::size_t>(spec.values[v]), nr_mlr, unc, cod,
               order2 ? "" : "  (uncoded beats coded here)");
    }
    const double gap_first = mlr_of(2, 0) - mlr_of(3, 0);
    const double gap_last = mlr_of(2, nv - 1) - mlr_of(3, nv - 1);
    const bool degrades = gap_last > gap_first;
    if (!degrades) pass = false;
    detail(degrades, "uncoded degrades relative to coded past cap: gap %.4f -> %.4f",
           gap_first, gap_last);
    verdict(2, pass, "Fig.-3 style ordering (point estimates, 5 seeds)");
    return pass;
}

bool criterion3() {
    std::puts("C3: duty-cycle advantage of coding at n_r = 11 (20 sensors)");
    const PooledPoint imm =
        pooled(Protocol::ImmediateForwarding, 20, 1, 5, 500000, 3003);
    const Analysis ana(make(Protocol::SingleRelayCoded, 20, 11));
    const double coded = ana.evaluate().rdc;
    const double ratio = imm.rdc / coded;
    const bool pass = imm.rdc >= 1.2 * coded;
    detail(pass, "rdc immediate=%.5f coded=%.5f ratio=%.3f (needs >= 1.20)", imm.rdc,
           coded, ratio);
    verdict(3, pass, "immediate forwarding needs >= 20% more relay airtime");
    return pass;
}

bool criterion4() {
    std::puts("C4: cooperative loss never exceeds single-relay; n_r = 1 gain >= 10%");
    const Analysis ana(make(Protocol::SingleRelayCoded, 20, 1));
    bool pass = true;
    for (int n_r = 1; n_r <= 15; ++n_r) {
        const double coop = ana.evaluate_for(n_r, Protocol::Cooperative).mlr;
        const double single = ana.evaluate_for(n_r, Protocol::SingleRelayCoded).mlr;
        const bool ok = coop <= single + 1e-12;
        if (!ok) pass = false;
        if (!ok || n_r == 1)
            detail(ok, "n_r=%2d coop %.4f <= single %.4f", n_r, coop, single);
    }
    const double coop1 = ana.evaluate_for(1, Protocol::Cooperative).mlr;
    const double single1 = ana.evaluate_for(1, Protocol::SingleRelayCoded).mlr;
    const double reduction = (single1 - coop1) / single1;
    const bool gain = reduction >= 0.10;
    if (!gain) pass = false;
    detail(gain, "relative reduction at n_r=1: %.1f%% (needs >= 10%%)", 100 * reduction);
    verdict(4, pass, "cooperative gains");
    return pass;
}

bool criterion5() {
    std::puts("C5: sensor-count trends and duty-cycle margins at n = 40");
    const std::vector<int> ns = {10, 20, 30, 40};
    bool pass = true;

    // proposed protocols: minimum-loss configuration from the closed form
    for (Protocol p : {Protocol::SingleRelayCoded, Protocol::Cooperative}) {
        double prev = -1.0;
        bool mono = true;
        std::string curve;
        for (int n : ns) {
            const Analysis ana(make(p, n, 1));
            const OptimalNr best = optimal_nr(ana, p, 20);
            char buf[48];
            std::snprintf(buf, sizeof(buf), " %.4f", best.mlr);
            curve += buf;
            if (best.mlr < prev - 1e-12) mono = false;
            prev = best.mlr;
        }
        if (!mono) pass = false;
        detail(mono, "%s min-loss non-decreasing in n:%s", protocol_name(p),
               curve.c_str());
    }
    // baselines: simulated trend with two-standard-error slack
    for (Protocol p : {Protocol::NoRelay, Protocol::ImmediateForwarding,
                       Protocol::UncodedForwarding}) {
        double prev = -1.0, prev_se = 0.0;
        bool mono = true;
        std::string curve;
        for (int n : ns) {
            const int n_r = p == Protocol::UncodedForwarding ? 8 : 1;
            const PooledPoint pt = pooled(p, n, n_r, 5, 300000, 5005 + n);
            char buf[48];
            std::snprintf(buf, sizeof(buf), " %.4f", pt.mlr);
            curve += buf;
            if (pt.mlr < prev - 2.0 * (pt.se + prev_se)) mono = false;
            prev = pt.mlr;
            prev_se = pt.se;
        }
        if (!mono) pass = false;
        detail(mono, "%s loss non-decreasing in n:%s", protocol_name(p), curve.c_str());
    }

    const PooledPoint imm40 =
        pooled(Protocol::ImmediateForwarding, 40, 1, 5, 500000, 6006);
    const Analysis ana40(make(Protocol::SingleRelayCoded, 40, 1));
    const OptimalNr single_best = optimal_nr(ana40, Protocol::SingleRelayCoded, 20);
    const double coded_rdc =
        ana40.evaluate_for(single_best.n_r, Protocol::SingleRelayCoded).rdc;
    const OptimalNr coop_best = optimal_nr(ana40, Protocol::Cooperative, 20);
    const double coop_rdc = ana40.evaluate_for(coop_best.n_r, Protocol::Cooperative).rdc;

    const bool coded_ok = coded_rdc <= 0.6 * imm40.rdc;
    if (!coded_ok) pass = false;
    detail(coded_ok,
           "coded rdc at n_r*=%d: %.5f vs 0.6 * immediate %.5f = %.5f (ratio %.3f)",
           single_best.n_r, coded_rdc, imm40.rdc, 0.6 * imm40.rdc,
           coded_rdc / imm40.rdc);
    const bool coop_ok = coop_rdc <= 0.85 * imm40.rdc;
    if (!coop_ok) pass = false;
    detail(coop_ok,
           "cooperative rdc at n_r*=%d: %.5f vs 0.85 * immediate %.5f = %.5f (ratio %.3f)",
           coop_best.n_r, coop_rdc, imm40.rdc, 0.85 * imm40.rdc, coop_rdc / imm40.rdc);
    verdict(5, pass, "sensor-count trends and relay-airtime margins");
    return pass;
}

bool criterion6() {
    std::puts("C6: optimal receive window vs sensor count");
    bool pass = true;
    int prev_single = 1000;
    for (int n : {10, 20, 30, 40}) {
        const Analysis ana(make(Protocol::SingleRelayCoded, n, 1));
        const OptimalNr coop = optimal_nr(ana, Protocol::Cooperative, 20);
        const OptimalNr single = optimal_nr(ana, Protocol::SingleRelayCoded, 20);
        const bool coop_ok = coop.n_r == 1;
        const bool interior = single.n_r > 1 && single.n_r < 20;
        const bool non_increasing = single.n_r <= prev_single;
        if (!coop_ok || !interior || !non_increasing) pass = false;
        detail(coop_ok && interior && non_increasing,
               "n=%2d: cooperative n_r*=%d, single-relay n_r*=%d", n, coop.n_r,
               single.n_r);
        prev_single = single.n_r;
    }
    verdict(6, pass, "cooperative optimum is 1; single optimum interior, non-increasing");
    return pass;
}

bool criterion7() {
    std::puts("C7: exact-formula unit checks");
    bool pass = true;

    bool ok = p_rw(1) == 0.5 && p_rw(11) == 11.0 / 12.0;
    if (!ok) pass = false;
    detail(ok, "p_rw(1) = %.10g, p_rw(11) = %.10g", p_rw(1), p_rw(11));

    ok = Analysis::s_c_binomial(0.37, 0.41, 1) == 1.0 &&
         Analysis::s_c_power(0.37, 0.41, 1) == 1.0;
    if (!ok) pass = false;
    detail(ok, "single-message coded frame always decodes (n_r = 1)");

    double max_gap = 0.0;
    for (int n_r = 1; n_r <= 64; ++n_r) {
        for (double f : {0.0, 0.2, 0.5, 0.85, 0.99}) {
            for (double frac : {0.0, 0.3, 1.0}) {
                const double p_gr = (1.0 - f) * frac;
                max_gap = std::max(max_gap,
                                   std::abs(Analysis::s_c_binomial(p_gr, f, n_r) -
                                            Analysis::s_c_power(p_gr, f, n_r)));
            }
        }
    }
    ok = max_gap <= 1e-12;
    if (!ok) pass = false;
    detail(ok, "binomial-sum vs power form, n_r <= 64: max gap %.2e", max_gap);

    const ValidatedConfig cfg = make(Protocol::SingleRelayCoded, 20, 11);
    ok = cfg.coded_frame_bytes(3) == 16;
    if (!ok) pass = false;
    detail(ok, "coded payload for 3 messages = %d bytes", cfg.coded_frame_bytes(3));

    const Analysis ana(cfg);
    bool ratio_ok = true;
    for (int n_r : {1, 5, 11, 15}) {
        const double single = ana.evaluate_for(n_r, Protocol::SingleRelayCoded).rdc;
        const double coop = ana.evaluate_for(n_r, Protocol::Cooperative).rdc;
        if (std::abs(coop / single - (n_r + 1.0) / (n_r + 0.5)) > 1e-12) ratio_ok = false;
    }
    if (!ratio_ok) pass = false;
    detail(ratio_ok, "rdc_coop/rdc_single = (n_r+1)/(n_r+0.5) exactly");

    verdict(7, pass, "exact formula suite");
    return pass;
}

bool criterion8() {
    std::puts("C8: time-on-air oracle values");
    const double t1 = airtime_s(7, 125000, 1, 8, true, 13, false);
    const double t2 = airtime_s(8, 125000, 1, 8, true, 12, false);
    const bool ok1 = std::abs(t1 - 0.046336) <= 1e-6;
    const bool ok2 = std::abs(t2 - 0.082432) <= 1e-6;
    detail(ok1, "SF7 / 13 B: %.6f s (expected 0.046336)", t1);
    detail(ok2, "SF8 / 12 B: %.6f s (expected 0.082432)", t2);
    const bool pass = ok1 && ok2;
    verdict(8, pass, "Semtech formula matches hand-computed values to 1 us");
    return pass;
}

bool criterion9() {
    std::puts("C9: standalone property suites");
    bool pass = true;

    // capture mutual exclusion on 3-contender dB grids
    {
        long cases = 0, mismatches = 0;
        const double zeta = dbm_to_mw(-126.0);
        const double xi = 6.0;
        const double xi_lin = db_to_linear(xi);
        for (double p0 = -130; p0 <= -90; p0 += 2)
            for (double p1 = -130; p1 <= -90; p1 += 2)
                for (double p2 = -130; p2 <= -90; p2 += 2) {
                    const std::vector<Contender> c = {{0, dbm_to_mw(p0)},
                                                      {1, dbm_to_mw(p1)},
                                                      {2, dbm_to_mw(p2)}};
                    int qualifiers = 0;
                    std::uint64_t expect_id = 0;
                    for (int i = 0; i < 3; ++i) {
                        if (c[i].rx_power_mw < zeta) continue;
                        bool wins = true;
                        for (int j = 0; j < 3; ++j)
                            if (j != i &&
                                !(c[i].rx_power_mw > xi_lin * c[j].rx_power_mw))
                                wins = false;
                        if (wins) {
                            ++qualifiers;
                            expect_id = c[i].frame_id;
                        }
                    }
                    const auto got = resolve_capture(c, zeta, xi);
                    ++cases;
                    if (qualifiers > 1) ++mismatches;
                    if (qualifiers == 0 && got.has_value()) ++mismatches;
                    if (qualifiers == 1 && (!got || *got != expect_id)) ++mismatches;
                }
        const bool ok = mismatches == 0;
        if (!ok) pass = false;
        detail(ok, "capture exclusion: %ld grid cases, %ld mismatches", cases,
               mismatches);
    }

    // XOR decode round trip on 1e4 random instances
    {
        RngStream rng(2718, "tie-break");
        long failures = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const int b_pl = 1 + static_cast<int>(rng.uniform_below(16));
            const int count = 1 + static_cast<int>(rng.uniform_below(8));
            std::vector<SensorMessage> msgs(count);
            for (int i = 0; i < count; ++i) {
                msgs[i].uid = i;
                msgs[i].id = {i, static_cast<std::uint32_t>(rng.uniform_below(256))};
                msgs[i].created_slot = 100 + i;
                msgs[i].payload.resize(b_pl);
                for (auto& b : msgs[i].payload)
                    b = static_cast<std::uint8_t>(rng.next_u64() & 0xFF);
            }
            const std::size_t missing = rng.uniform_below(count);
            GatewayStore store;
            std::vector<const SensorMessage*> ptrs;
            for (int i = 0; i < count; ++i) {
                ptrs.push_back(&msgs[i]);
                if (static_cast<std::size_t>(i) != missing)
                    store.insert(msgs[i].id, msgs[i].uid, msgs[i].created_slot,
                                 msgs[i].payload);
            }
            const DecodeOutcome out =
                decode_coded_frame(store, build_coded_frame(ptrs, 100, b_pl, 2));
            if (out.kind != DecodeKind::Recovered ||
                out.recovered_payload != msgs[missing].payload)
                ++failures;
        }
        const bool ok = failures == 0;
        if (!ok) pass = false;
        detail(ok, "XOR decode round trip: 10000 instances, %ld failures", failures);
    }

    // cooperative one-listener assertion over 1e5 slots
    {
        bool ok = true;
        std::int64_t rw_slots = 0;
        try {
            Simulator sim(make(Protocol::Cooperative, 20, 5), 99);
            const RunMetrics m = sim.run(100000);
            rw_slots = m.audit.rw_slots;
            ok = rw_slots == 100000;
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok) pass = false;
        detail(ok, "cooperative listener coverage: %lld of 100000 slots",
               static_cast<long long>(rw_slots));
    }

    // message conservation on every protocol
    {
        bool ok = true;
        for (Protocol p : {Protocol::NoRelay, Protocol::ImmediateForwarding,
                           Protocol::UncodedForwarding, Protocol::SingleRelayCoded,
                           Protocol::Cooperative}) {
            try {
                Simulator sim(make(p, 20, 7), 123);
                const RunMetrics m = sim.run(200000);
                if (m.messages_generated !=
                    m.delivered_direct + m.delivered_via_relay + m.lost)
                    ok = false;
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) pass = false;
        detail(ok, "conservation: generated = direct + via_relay + lost on all 5 protocols");
    }

    verdict(9, pass, "property suites");
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc < 2 || std::strcmp(argv[1], "all") == 0) {
        for (int i = 1; i <= 9; ++i) which.push_back(i);
    } else {
        for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    }

    bool all_pass = true;
    for (int c : which) {
        bool pass = false;
        switch (c) {
            case 1: pass = criterion1(); break;
            case 2: pass = criterion2(); break;
            case 3: pass = criterion3(); break;
            case 4: pass = criterion4(); break;
            case 5: pass = criterion5(); break;
            case 6: pass = criterion6(); break;
            case 7: pass = criterion7(); break;
            case 8: pass = criterion8(); break;
            case 9: pass = criterion9(); break;
            default:
                std::fprintf(stderr, "unknown criterion %d\n", c);
                return 2;
        }
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
