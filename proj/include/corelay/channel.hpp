#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "corelay/distance_law.hpp"
#include "corelay/quadrature.hpp"
#include "corelay/rng.hpp"

namespace corelay {

inline double db_to_linear(double db) { return std::pow(10.0, 0.1 * db); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

// LoRa time on air in seconds for one frame.
//
//   T_sym    = 2^sf / BW
//   preamble = (n_preamble + 4.25) * T_sym
//   n_pay    = 8 + max(ceil((8*PL - 4*sf + 28 + 16 - 20*IH) / (4*(sf - 2*DE))) * (CR + 4), 0)
//
// CRC on, IH = 0 for an explicit header, DE = 1 with low-data-rate
// optimization. coding_rate is the CR index (1 => 4/5 ... 4 => 4/8).
double airtime_s(int sf, double bandwidth_hz, int coding_rate, int preamble_symbols,
                 bool explicit_header, int payload_bytes, bool low_dr_optimize);

// Semtech default: enable low-data-rate optimization for SF11/12 at 125 kHz.
inline bool low_dr_default(int sf, double bandwidth_hz) {
    return sf >= 11 && bandwidth_hz <= 125000.0;
}

// Received power gamma * A * d^-alpha in mW.
inline double rx_power_mw(double gamma_linear, double fading_a, double distance_m,
                          double alpha) {
    return gamma_linear * fading_a * std::pow(distance_m, -alpha);
}

// Unit-mean exponential power fading (Rayleigh amplitude). The only built-in
// family; cdf_received_power accepts any cdf so alternatives stay pluggable.
struct RayleighPowerFading {
    static double cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }
    static double ccdf(double x) { return x <= 0.0 ? 1.0 : std::exp(-x); }
    static double quantile(double u) { return -std::log1p(-u); }
    static double sample(RngStream& rng) { return rng.rayleigh_power(); }
};

// One same-SF frame overlapping a slot at one receiver.
struct Contender {
    std::uint64_t frame_id = 0;
    double rx_power_mw = 0.0;
};

// Capture resolution among same-SF frames in one slot. The winner must be at
// or above the sensitivity floor and exceed the strongest other contender by
// strictly more than the capture threshold; power ties lose. At most one
// frame can satisfy both conditions.
std::optional<std::uint64_t> resolve_capture(std::span<const Contender> contenders,
                                             double sensitivity_mw,
                                             double capture_threshold_db);

// cdf of the received power R = gamma * A * D^-alpha at level x, for a node
// at a random distance D:  F_R(x) = E_D[ F_A(gamma^-1 * D^alpha * x) ].
// Closed form for a fixed distance, adaptive quadrature otherwise.
double cdf_received_power(const DistanceLaw& law,
                          const std::function<double(double)>& fading_cdf,
                          double gamma_linear, double alpha, double x,
                          double rel_tol = 1e-8);

}  // namespace corelay
