#include "corelay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corelay/channel.hpp"
#include "corelay/quadrature.hpp"

namespace corelay {

namespace {

// Poisson deconditioning factor: with the exponential form this is
// exp(x - nu); the exact form keeps the sum truncated at n-1 interferers,
// exp(-nu) * sum_{k=0}^{n-1} x^k / k!.
double decondition(double x, double nu, int n_sensors, SumForm form) {
    if (form == SumForm::Exponential) return std::exp(x - nu);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= n_sensors - 1; ++k) {
        term *= x / k;
        sum += term;
    }
    return std::exp(-nu) * sum;
}

}  // namespace

double p_rw(int n_r) {
    if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");
    return n_r / (n_r + 1.0);
}

Analysis::Analysis(const ValidatedConfig& cfg, double tol) : cfg_(cfg), tol_(tol) {
    nu_ = cfg_.nu();

    // Relay-to-gateway link: different SF from the sensors, so only fading
    // matters. 1 - F_A(zeta_r * d_r^alpha / gamma).
    const double d_r = cfg_.geometry().relay_to_gateway_m;
    s_rg_ = RayleighPowerFading::ccdf(cfg_.sensitivity_mw(cfg_.sf_relay()) *
                                      std::pow(d_r, cfg_.alpha()) / cfg_.gamma_linear());

    s_dir_ = expect_single(cfg_.geometry().sensor_to_gateway, true);
    e_relay_ = expect_single(cfg_.geometry().sensor_to_relay, true);
    e_both_ = expect_both(true);

    s_sr_per_rw_ = e_relay_ - e_both_;

    const double n_ptx = cfg_.n_sensors() * cfg_.p_tx();
    f_raw_ = 1.0 - n_ptx * e_relay_;
    f_ = std::clamp(f_raw_, 0.0, 1.0);
    if (f_raw_ < 0.0 || f_raw_ > 1.0) {
        warnings_.push_back("FOutOfRange: empty-slot probability evaluated to " +
                            std::to_string(f_raw_) + "; clamped to [0,1]");
    }
    p_gr_ = n_ptx * e_both_;

    // The clustered closed form is exact when fading never drops a frame.
    if (cfg_.geometry().sensor_to_gateway.degenerate() &&
        cfg_.geometry().sensor_to_relay.degenerate()) {
        const double zeta_s = cfg_.sensitivity_mw(cfg_.sf_sensor());
        const double miss_gw = RayleighPowerFading::cdf(
            zeta_s * std::pow(cfg_.geometry().sensor_to_gateway.d, cfg_.alpha()) /
            cfg_.gamma_linear());
        const double miss_relay = RayleighPowerFading::cdf(
            zeta_s * std::pow(cfg_.geometry().sensor_to_relay.d, cfg_.alpha()) /
            cfg_.gamma_linear());
        clustered_ok_ = std::max(miss_gw, miss_relay) < 1e-6;
        if (clustered_ok_) {
            e_relay_nofade_ = expect_single(cfg_.geometry().sensor_to_relay, false);
            e_both_nofade_ = expect_both(false);
        }
    }
}

// Lower integration bound in quantile space for the fading coefficient:
// u0 = F_A(a_min), a_min = zeta * d^alpha / gamma. Below it the frame is
// under the sensitivity floor regardless of interference.
static double fading_quantile_floor(const ValidatedConfig& cfg, double distance_m) {
    const double a_min = cfg.sensitivity_mw(cfg.sf_sensor()) *
                         std::pow(distance_m, cfg.alpha()) / cfg.gamma_linear();
    return RayleighPowerFading::cdf(a_min);
}

// Interference survival cdf at a receiver: probability that one interferer's
// power stays below the desired power divided by the capture ratio.
static double lambda_at(const ValidatedConfig& cfg, const DistanceLaw& population_law,
                        double fading_a, double distance_m, double quad_tol) {
    const double level = cfg.gamma_linear() * fading_a *
                         std::pow(distance_m, -cfg.alpha()) / cfg.xi_linear();
    return cdf_received_power(population_law,
                              [](double x) { return RayleighPowerFading::cdf(x); },
                              cfg.gamma_linear(), cfg.alpha(), level, quad_tol);
}

// E[ theta(A, D) * G(nu * lambda(A, D)) ] for one receiver whose node
// population follows `law`. With restricted = false the sensitivity
// indicator theta is dropped (the clustered approximation).
double Analysis::expect_single(const DistanceLaw& law, bool restricted) const {
    const double cdf_tol = std::min(1e-8, tol_ * 1e-2);
    auto inner = [&](double d) {
        const double u0 = restricted ? fading_quantile_floor(cfg_, d) : 0.0;
        if (u0 >= 1.0) return 0.0;
        return integrate(
            [&](double u) {
                const double a = RayleighPowerFading::quantile(u);
                const double lam = lambda_at(cfg_, law, a, d, cdf_tol);
                return decondition(nu_ * lam, nu_, cfg_.n_sensors(), cfg_.sum_form());
            },
            u0, 1.0, tol_);
    };
    if (law.degenerate()) return inner(law.d);
    return integrate([&](double v) { return inner(law.quantile(v)); }, 0.0, 1.0, tol_);
}

double Analysis::expect_both(bool restricted) const {
    const DistanceLaw& gw_law = cfg_.geometry().sensor_to_gateway;
    const DistanceLaw& relay_law = cfg_.geometry().sensor_to_relay;
    const double cdf_tol = std::min(1e-8, tol_ * 1e-2);

    auto inner = [&](double d0, double d1) {
        const double u0 = restricted ? fading_quantile_floor(cfg_, d0) : 0.0;
        const double u1 = restricted ? fading_quantile_floor(cfg_, d1) : 0.0;
        if (u0 >= 1.0 || u1 >= 1.0) return 0.0;
        return integrate(
            [&](double ua) {
                const double a0 = RayleighPowerFading::quantile(ua);
                const double lam0 = lambda_at(cfg_, gw_law, a0, d0, cdf_tol);
                return integrate(
                    [&](double ub) {
                        const double a1 = RayleighPowerFading::quantile(ub);
                        const double lam1 = lambda_at(cfg_, relay_law, a1, d1, cdf_tol);
                        return decondition(nu_ * lam0 * lam1, nu_, cfg_.n_sensors(),
                                           cfg_.sum_form());
                    },
                    u1, 1.0, tol_);
            },
            u0, 1.0, tol_);
    };

    auto over_relay = [&](double d0) {
        if (relay_law.degenerate()) return inner(d0, relay_law.d);
        return integrate([&](double v) { return inner(d0, relay_law.quantile(v)); }, 0.0,
                         1.0, tol_);
    };
    if (gw_law.degenerate()) return over_relay(gw_law.d);
    return integrate([&](double v) { return over_relay(gw_law.quantile(v)); }, 0.0, 1.0,
                     tol_);
}

double Analysis::s_sr_general(int n_r) const { return p_rw(n_r) * s_sr_per_rw_; }

double Analysis::s_sr_clustered(int n_r) const {
    if (!clustered_ok_)
        throw std::logic_error(
            "clustered closed form requires fixed distances and clear fading margins");
    return p_rw(n_r) * (e_relay_nofade_ - e_both_nofade_);
}

double Analysis::s_sr(int n_r) const {
    return clustered_ok_ ? s_sr_clustered(n_r) : s_sr_general(n_r);
}

double Analysis::s_c_binomial(double p_gr, double f, int n_r) {
    if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");
    const int slots = n_r - 1;
    if (slots == 0) return 1.0;
    if (f <= 0.0) return std::pow(p_gr, slots);
    double term = std::pow(f, slots);  // m = 0
    double sum = term;
    for (int m = 1; m <= slots; ++m) {
        term *= static_cast<double>(slots - m + 1) / m * (p_gr / f);
        sum += term;
    }
    return sum;
}

double Analysis::s_c_power(double p_gr, double f, int n_r) {
    if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");
    return std::pow(p_gr + f, n_r - 1);
}

double Analysis::s_c(int n_r) const {
    const double binom = s_c_binomial(p_gr_, f_, n_r);
    const double power = s_c_power(p_gr_, f_, n_r);
    if (std::abs(binom - power) > 1e-12)
        throw std::logic_error("coded-decode probability forms disagree beyond 1e-12");
    return binom;
}

double Analysis::l_av_s(int n_r) const {
    // Messages captured per receive window are binomial(n_r, 1 - f); the
    // empty-buffer outcome (m = 0) transmits nothing.
    const double q = 1.0 - f_;
    double l_av = 0.0;
    double prob = std::pow(f_, n_r);  // m = 0
    for (int m = 1; m <= n_r; ++m) {
        if (f_ <= 0.0) {
            prob = (m == n_r) ? std::pow(q, n_r) : 0.0;
        } else {
            prob *= static_cast<double>(n_r - m + 1) / m * (q / f_);
        }
        l_av += prob * cfg_.relay_frame_airtime_s(cfg_.coded_frame_bytes(m));
    }
    return l_av;
}

PerformanceResult Analysis::evaluate() const {
    return evaluate_for(cfg_.n_r(), cfg_.protocol());
}

PerformanceResult Analysis::evaluate_for(int n_r, Protocol protocol) const {
    if (!protocol_has_analysis(protocol))
        throw std::invalid_argument(std::string("UnsupportedProtocolForAnalysis: ") +
                                    protocol_name(protocol) +
                                    " has no closed-form model");
    if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");

    PerformanceResult res;
    res.warnings = warnings_;

    LinkProbabilities& lp = res.intermediates;
    lp.nu = nu_;
    lp.s_dir = s_dir_;
    lp.s_rg = s_rg_;
    lp.f = f_;
    lp.p_gr = p_gr_;
    lp.p_rw = protocol == Protocol::Cooperative ? 1.0 : corelay::p_rw(n_r);
    lp.s_sr = lp.p_rw * (clustered_ok_ ? (e_relay_nofade_ - e_both_nofade_)
                                       : s_sr_per_rw_);
    lp.s_c = s_c(n_r);

    const double s_rel = lp.s_sr * lp.s_rg * lp.s_c;
    res.mlr = 1.0 - lp.s_dir - s_rel;
    if (res.mlr < -1e-9 || res.mlr > 1.0 + 1e-9)
        throw std::logic_error("loss rate escaped [0,1]");
    res.mlr = std::clamp(res.mlr, 0.0, 1.0);

    res.l_av_s = l_av_s(n_r);
    const double l_s = cfg_.slot_len_s();
    if (protocol == Protocol::Cooperative) {
        res.rdc = res.l_av_s / ((n_r + 0.5) * l_s);
        res.rdc_schedule = res.l_av_s / (n_r * l_s);
    } else {
        res.rdc = res.l_av_s / ((n_r + 1.0) * l_s);
        res.rdc_schedule = res.rdc;
    }
    return res;
}

OptimalNr optimal_nr(const Analysis& analysis, Protocol protocol, int n_r_max) {
    if (n_r_max < 1) throw std::invalid_argument("n_r_max must be >= 1");
    OptimalNr best;
    best.n_r = 1;
    best.mlr = analysis.evaluate_for(1, protocol).mlr;
    for (int n_r = 2; n_r <= n_r_max; ++n_r) {
        const double mlr = analysis.evaluate_for(n_r, protocol).mlr;
        if (mlr < best.mlr) {
            best.n_r = n_r;
            best.mlr = mlr;
        }
    }
    return best;
}

}  // namespace corelay
