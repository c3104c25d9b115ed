#include "corelay/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace corelay {

double airtime_s(int sf, double bandwidth_hz, int coding_rate, int preamble_symbols,
                 bool explicit_header, int payload_bytes, bool low_dr_optimize) {
    if (sf < 7 || sf > 12) throw std::invalid_argument("spreading factor must be in [7,12]");
    if (payload_bytes < 1) throw std::invalid_argument("payload must be at least 1 byte");
    if (coding_rate < 1 || coding_rate > 4) throw std::invalid_argument("coding rate index must be in [1,4]");
    if (!(bandwidth_hz > 0)) throw std::invalid_argument("bandwidth must be > 0");

    const double t_sym = std::pow(2.0, sf) / bandwidth_hz;
    const double t_preamble = (preamble_symbols + 4.25) * t_sym;

    const int ih = explicit_header ? 0 : 1;
    const int de = low_dr_optimize ? 1 : 0;
    const int crc_bits = 16;
    const double num = 8.0 * payload_bytes - 4.0 * sf + 28.0 + crc_bits - 20.0 * ih;
    const double den = 4.0 * (sf - 2 * de);
    const double n_payload =
        8.0 + std::max(std::ceil(num / den) * (coding_rate + 4), 0.0);

    return t_preamble + n_payload * t_sym;
}

std::optional<std::uint64_t> resolve_capture(std::span<const Contender> contenders,
                                             double sensitivity_mw,
                                             double capture_threshold_db) {
    if (contenders.empty()) return std::nullopt;
    const double xi = db_to_linear(capture_threshold_db);

    // Find the two strongest powers; only the strongest frame can win.
    std::size_t best = 0;
    double best_p = -1.0, second_p = -1.0;
    for (std::size_t i = 0; i < contenders.size(); ++i) {
        const double p = contenders[i].rx_power_mw;
        if (p > best_p) {
            second_p = best_p;
            best_p = p;
            best = i;
        } else if (p > second_p) {
            second_p = p;
        }
    }

    if (best_p < sensitivity_mw) return std::nullopt;
    if (contenders.size() > 1 && !(best_p > xi * second_p)) return std::nullopt;
    return contenders[best].frame_id;
}

double cdf_received_power(const DistanceLaw& law,
                          const std::function<double(double)>& fading_cdf,
                          double gamma_linear, double alpha, double x,
                          double rel_tol) {
    if (x <= 0.0) return 0.0;
    if (law.degenerate()) {
        return fading_cdf(std::pow(law.d, alpha) * x / gamma_linear);
    }
    const double value = integrate(
        [&](double u) {
            return fading_cdf(std::pow(u, alpha) * x / gamma_linear) * law.pdf(u);
        },
        law.lower(), law.upper(), rel_tol);
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace corelay
