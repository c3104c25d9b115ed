#include "corelay/config.hpp"

#include <cmath>
#include <stdexcept>

#include "corelay/channel.hpp"

namespace corelay {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::NoRelay: return "no_relay";
        case Protocol::ImmediateForwarding: return "immediate_forwarding";
        case Protocol::UncodedForwarding: return "uncoded_forwarding";
        case Protocol::SingleRelayCoded: return "single_relay_coded";
        case Protocol::Cooperative: return "cooperative";
    }
    return "?";
}

std::optional<Protocol> protocol_from_name(const std::string& name) {
    for (Protocol p : {Protocol::NoRelay, Protocol::ImmediateForwarding,
                       Protocol::UncodedForwarding, Protocol::SingleRelayCoded,
                       Protocol::Cooperative}) {
        if (name == protocol_name(p)) return p;
    }
    return std::nullopt;
}

bool protocol_uses_relay(Protocol p) { return p != Protocol::NoRelay; }

bool protocol_has_analysis(Protocol p) {
    return p == Protocol::SingleRelayCoded || p == Protocol::Cooperative;
}

bool protocol_uses_receive_window(Protocol p) {
    return p == Protocol::SingleRelayCoded || p == Protocol::Cooperative ||
           p == Protocol::UncodedForwarding;
}

const char* config_error_code_name(ConfigErrorCode code) {
    switch (code) {
        case ConfigErrorCode::InvalidWindow: return "InvalidWindow";
        case ConfigErrorCode::SlotTooShort: return "SlotTooShort";
        case ConfigErrorCode::BadSf: return "BadSf";
        case ConfigErrorCode::NegativeRate: return "NegativeRate";
        case ConfigErrorCode::BadGeometry: return "BadGeometry";
        case ConfigErrorCode::BadBytes: return "BadBytes";
        case ConfigErrorCode::BadValue: return "BadValue";
    }
    return "?";
}

std::map<int, double> ScenarioConfig::default_sensitivity_table() {
    return {{7, -123.0}, {8, -126.0}, {9, -129.0},
            {10, -132.0}, {11, -134.5}, {12, -137.0}};
}

double ScenarioConfig::gamma_db_for_margin(double margin_db, double distance_m,
                                           double alpha, double sensitivity_dbm) {
    // median(R) [dBm] = gamma_db + 10*log10(ln 2) - 10*alpha*log10(d)
    return sensitivity_dbm + margin_db - 10.0 * std::log10(std::log(2.0)) +
           10.0 * alpha * std::log10(distance_m);
}

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig cfg;
    cfg.gamma_db = gamma_db_for_margin(10.0, cfg.geometry.sensor_to_gateway.d,
                                       cfg.path_loss_exponent,
                                       cfg.sensitivity_dbm_by_sf.at(cfg.sf_sensor));
    return cfg;
}

double p_tx(double lambda_rate, double slot_len_s) {
    return -std::expm1(-lambda_rate * slot_len_s);
}

double ValidatedConfig::sensitivity_mw(int sf) const {
    return dbm_to_mw(cfg_.sensitivity_dbm_by_sf.at(sf));
}

double ValidatedConfig::relay_frame_airtime_s(int payload_bytes) const {
    return airtime_s(cfg_.sf_relay, cfg_.bandwidth_hz, cfg_.coding_rate,
                     cfg_.preamble_symbols, cfg_.explicit_header, payload_bytes,
                     low_dr_default(cfg_.sf_relay, cfg_.bandwidth_hz));
}

int ValidatedConfig::cycle_slots() const {
    switch (cfg_.protocol) {
        case Protocol::SingleRelayCoded:
        case Protocol::UncodedForwarding:
            return cfg_.n_r + 1;
        case Protocol::Cooperative:
            return cfg_.n_r + 1 + n_s_;
        case Protocol::ImmediateForwarding:
            return 2;
        case Protocol::NoRelay:
            return 1;
    }
    return 1;
}

double ValidatedConfig::p_tx() const {
    return corelay::p_tx(cfg_.lambda_rate, slot_len_s_);
}

double ValidatedConfig::nu() const { return (cfg_.n_sensors - 1) * p_tx(); }

const ValidatedConfig& ValidationResult::value() const {
    if (!config) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) msg += " [" + std::string(config_error_code_name(e.code)) + "] " + e.message + ";";
        throw std::invalid_argument(msg);
    }
    return *config;
}

ValidationResult validate_config(const ScenarioConfig& cfg) {
    ValidationResult result;
    auto fail = [&](ConfigErrorCode code, std::string msg) {
        result.errors.push_back({code, std::move(msg)});
    };

    if (cfg.n_sensors < 1) fail(ConfigErrorCode::BadValue, "n_sensors must be >= 1");
    if (!(cfg.lambda_rate > 0))
        fail(ConfigErrorCode::NegativeRate, "lambda_rate must be > 0");
    if (cfg.sf_sensor < 7 || cfg.sf_sensor > 12)
        fail(ConfigErrorCode::BadSf, "sf_sensor must be in [7,12]");
    if (cfg.sf_relay < 7 || cfg.sf_relay > 12)
        fail(ConfigErrorCode::BadSf, "sf_relay must be in [7,12]");
    if (cfg.n_r < 1) fail(ConfigErrorCode::InvalidWindow, "n_r must be >= 1");
    if (!(cfg.bandwidth_hz > 0)) fail(ConfigErrorCode::BadValue, "bandwidth_hz must be > 0");
    if (cfg.coding_rate < 1 || cfg.coding_rate > 4)
        fail(ConfigErrorCode::BadValue, "coding_rate index must be in [1,4]");
    if (cfg.preamble_symbols < 1)
        fail(ConfigErrorCode::BadValue, "preamble_symbols must be >= 1");
    if (cfg.b_pl < 1) fail(ConfigErrorCode::BadBytes, "b_pl must be >= 1");
    if (cfg.b_id < 1) fail(ConfigErrorCode::BadBytes, "b_id must be >= 1");
    if (cfg.b_seq < 1) fail(ConfigErrorCode::BadBytes, "b_seq must be >= 1");
    if (cfg.b_seq > 4) fail(ConfigErrorCode::BadBytes, "b_seq above 4 bytes is not supported");
    if (!(cfg.path_loss_exponent > 0))
        fail(ConfigErrorCode::BadValue, "path_loss_exponent must be > 0");
    if (!(cfg.capture_threshold_db >= 0))
        fail(ConfigErrorCode::BadValue, "capture_threshold_db must be >= 0");
    if (!(cfg.geometry.relay_to_gateway_m > 0))
        fail(ConfigErrorCode::BadGeometry, "relay_to_gateway_m must be > 0");

    for (int sf : {cfg.sf_sensor, cfg.sf_relay}) {
        if (sf >= 7 && sf <= 12 && !cfg.sensitivity_dbm_by_sf.count(sf))
            fail(ConfigErrorCode::BadValue,
                 "sensitivity table has no entry for SF" + std::to_string(sf));
    }

    auto check_law = [&](const DistanceLaw& law, const char* name) {
        switch (law.kind) {
            case DistanceLaw::Kind::Fixed:
                if (!(law.d > 0))
                    fail(ConfigErrorCode::BadGeometry,
                         std::string(name) + ": fixed distance must be > 0");
                break;
            case DistanceLaw::Kind::UniformAnnulus:
                if (!(law.r_min > 0) || !(law.r_min <= law.r_max))
                    fail(ConfigErrorCode::BadGeometry,
                         std::string(name) + ": annulus requires 0 < r_min <= r_max");
                break;
            case DistanceLaw::Kind::UniformDisc:
                if (!(law.r_max > 0))
                    fail(ConfigErrorCode::BadGeometry,
                         std::string(name) + ": disc requires r_max > 0");
                break;
        }
    };
    check_law(cfg.geometry.sensor_to_gateway, "sensor_to_gateway");
    check_law(cfg.geometry.sensor_to_relay, "sensor_to_relay");

    int n_s_resolved = 0;
    if (cfg.protocol == Protocol::Cooperative) {
        n_s_resolved = cfg.n_r - 1;
        if (cfg.n_s && *cfg.n_s != n_s_resolved)
            fail(ConfigErrorCode::InvalidWindow,
                 "cooperative schedule requires n_s = n_r - 1 (expected " +
                     std::to_string(n_s_resolved) + ", got " + std::to_string(*cfg.n_s) + ")");
    } else if (cfg.n_s) {
        fail(ConfigErrorCode::InvalidWindow,
             "n_s is only meaningful for the cooperative protocol");
    }

    double sensor_airtime = 0.0;
    const bool sf_ok = cfg.sf_sensor >= 7 && cfg.sf_sensor <= 12 && cfg.b_pl >= 1 &&
                       cfg.b_id >= 1 && cfg.b_seq >= 1 && cfg.bandwidth_hz > 0 &&
                       cfg.coding_rate >= 1 && cfg.coding_rate <= 4 &&
                       cfg.preamble_symbols >= 1;
    double slot_len = 0.0;
    if (sf_ok) {
        sensor_airtime = airtime_s(cfg.sf_sensor, cfg.bandwidth_hz, cfg.coding_rate,
                                   cfg.preamble_symbols, cfg.explicit_header,
                                   cfg.b_pl + cfg.b_id + cfg.b_seq,
                                   low_dr_default(cfg.sf_sensor, cfg.bandwidth_hz));
        if (cfg.slot_len_s) {
            slot_len = *cfg.slot_len_s;
            if (!(slot_len > 0)) {
                fail(ConfigErrorCode::BadValue, "slot_len_s must be > 0");
            } else if (slot_len + 1e-12 < sensor_airtime) {
                fail(ConfigErrorCode::SlotTooShort,
                     "slot_len_s " + std::to_string(slot_len) +
                         " s is shorter than the sensor frame airtime " +
                         std::to_string(sensor_airtime) + " s");
            }
        } else {
            // Sensor frame airtime rounded up to the next millisecond.
            slot_len = std::ceil(sensor_airtime * 1000.0 - 1e-9) / 1000.0;
        }
    }

    if (!result.errors.empty()) return result;

    if (cfg.lambda_rate * slot_len > 0.05) {
        result.warnings.push_back(
            "lambda * slot_len = " + std::to_string(cfg.lambda_rate * slot_len) +
            " is not small; the one-transmission-per-slot traffic model degrades");
    }

    ValidatedConfig v;
    v.cfg_ = cfg;
    v.slot_len_s_ = slot_len;
    v.n_s_ = n_s_resolved;
    v.gamma_linear_ = db_to_linear(cfg.gamma_db);
    v.xi_linear_ = db_to_linear(cfg.capture_threshold_db);
    v.sensor_airtime_s_ = sensor_airtime;
    v.seq_modulus_ = cfg.b_seq >= 4 ? 0xFFFFFFFFu
                                    : (std::uint32_t{1} << (8 * cfg.b_seq));
    const double uncoded_airtime = v.relay_frame_airtime_s(v.sensor_frame_bytes());
    v.cap_uncoded_ = std::max(1, static_cast<int>(std::floor(slot_len / uncoded_airtime)));

    if (protocol_uses_receive_window(cfg.protocol) &&
        cfg.protocol != Protocol::UncodedForwarding) {
        const double worst = v.relay_frame_airtime_s(v.coded_frame_bytes(cfg.n_r));
        if (worst > slot_len) {
            result.warnings.push_back(
                "CodedFrameOverflow: a coded frame summing " + std::to_string(cfg.n_r) +
                " messages lasts " + std::to_string(worst) +
                " s and does not fit the " + std::to_string(slot_len) + " s transmit slot");
        }
    }

    result.config = std::move(v);
    return result;
}

}  // namespace corelay
