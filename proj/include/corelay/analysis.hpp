#pragma once

#include <string>
#include <vector>

#include "corelay/config.hpp"

namespace corelay {

// Intermediate probabilities of the delivery chain, kept for audit output.
struct LinkProbabilities {
    double s_dir = 0.0;  // direct sensor-to-gateway delivery
    double s_sr = 0.0;   // lost at the gateway but received by a listening relay
    double s_rg = 0.0;   // relay frame delivered to the gateway
    double s_c = 0.0;    // coded frame decodable (exactly one message missing)
    double p_gr = 0.0;   // per slot: some frame received by both relay and gateway
    double f = 0.0;      // per slot: nothing received at the listening relay
    double p_rw = 0.0;   // transmission falls into the receive window
    double nu = 0.0;     // mean number of interferers
};

struct PerformanceResult {
    double mlr = 0.0;
    double rdc = 0.0;
    double l_av_s = 0.0;           // mean relay transmission time per transmit window
    LinkProbabilities intermediates;
    // Airtime fraction implied by the relay schedule. Equal to rdc for the
    // single-relay protocol; for the cooperative protocol the closed form
    // normalizes by (n_r + 0.5) slots while the two-relay schedule transmits
    // one frame every n_r slots of wall-clock time.
    double rdc_schedule = 0.0;
    std::vector<std::string> warnings;
};

double p_rw(int n_r);

// Closed-form loss and duty-cycle model for the coded relaying protocols.
// Expectations over fading (and, when the geometry laws are not fixed,
// distance) are evaluated by deterministic nested adaptive quadrature, so
// results are seed-free and reproducible. The chain pieces that do not
// depend on n_r are computed once, which makes receive-window scans cheap.
class Analysis {
public:
    explicit Analysis(const ValidatedConfig& cfg, double tol = 1e-6);

    double nu() const { return nu_; }
    double s_dir() const { return s_dir_; }
    double s_rg() const { return s_rg_; }
    double f() const { return f_; }
    double f_raw() const { return f_raw_; }
    double p_gr() const { return p_gr_; }

    // P(lost at gateway and received by the listening relay) for a frame
    // already inside the receive window; s_sr = p_rw * this.
    double s_sr_per_rw_slot() const { return s_sr_per_rw_; }

    // General path, valid for any geometry and margins.
    double s_sr_general(int n_r) const;
    // Clustered closed form: fixed distances, fading losses neglected.
    double s_sr_clustered(int n_r) const;
    // Picks the clustered form when both laws are fixed and margins are
    // clear enough for it to be exact to ~1e-6, the general form otherwise.
    double s_sr(int n_r) const;

    double s_c(int n_r) const;
    double l_av_s(int n_r) const;

    PerformanceResult evaluate() const;
    PerformanceResult evaluate_for(int n_r, Protocol protocol) const;

    static double s_c_binomial(double p_gr, double f, int n_r);
    static double s_c_power(double p_gr, double f, int n_r);

    const ValidatedConfig& config() const { return cfg_; }

private:
    double expect_single(const DistanceLaw& law, bool restricted) const;
    double expect_both(bool restricted) const;

    ValidatedConfig cfg_;
    double tol_;
    double nu_ = 0.0;
    double s_dir_ = 0.0;
    double s_rg_ = 0.0;
    double e_relay_ = 0.0;        // E[theta1 * G(nu * lambda_relay)]
    double e_both_ = 0.0;         // E[theta0 * theta1 * G(nu * lambda_gw * lambda_relay)]
    double e_relay_nofade_ = 0.0; // same with fading thresholds ignored
    double e_both_nofade_ = 0.0;
    double s_sr_per_rw_ = 0.0;
    double f_raw_ = 0.0;
    double f_ = 0.0;
    double p_gr_ = 0.0;
    bool clustered_ok_ = false;
    std::vector<std::string> warnings_;
};

struct OptimalNr {
    int n_r = 1;
    double mlr = 1.0;
};

// Exhaustive scan of n_r in [1, n_r_max]; ties break toward smaller n_r.
OptimalNr optimal_nr(const Analysis& analysis, Protocol protocol, int n_r_max);

}  // namespace corelay
