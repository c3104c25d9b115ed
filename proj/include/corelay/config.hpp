#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corelay/distance_law.hpp"

namespace corelay {

enum class Protocol {
    NoRelay,
    ImmediateForwarding,
    UncodedForwarding,
    SingleRelayCoded,
    Cooperative,
};

const char* protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(const std::string& name);
bool protocol_uses_relay(Protocol p);
bool protocol_has_analysis(Protocol p);  // only the two coded protocols
bool protocol_uses_receive_window(Protocol p);

// Which closed form is used when deconditioning on the interferer count:
// the exponential approximation of the Poisson sum, or the truncated sum
// up to n-1 interferers.
enum class SumForm { Exponential, ExactTruncated };

struct Geometry {
    DistanceLaw sensor_to_gateway = DistanceLaw::fixed(2000.0);
    DistanceLaw sensor_to_relay = DistanceLaw::fixed(800.0);
    double relay_to_gateway_m = 1200.0;

    bool operator==(const Geometry&) const = default;
};

// Full scenario description; the single source of truth shared by the
// analysis and the simulator. Optional fields resolve during validation.
struct ScenarioConfig {
    int n_sensors = 20;
    double lambda_rate = 1.0 / 17.5;         // arrivals per second per sensor
    std::optional<double> slot_len_s;        // nullopt = derived from the sensor frame
    int sf_sensor = 8;
    int sf_relay = 7;
    double bandwidth_hz = 125000.0;
    int coding_rate = 1;                     // CR index, 1 => 4/5
    int preamble_symbols = 8;
    bool explicit_header = true;
    int b_pl = 10;                           // measurement bytes
    int b_id = 1;                            // sensor id bytes
    int b_seq = 1;                           // sequence number bytes
    double path_loss_exponent = 3.5;
    double gamma_db = 0.0;                   // link constant, dB
    std::map<int, double> sensitivity_dbm_by_sf = default_sensitivity_table();
    double capture_threshold_db = 6.0;
    Geometry geometry;
    Protocol protocol = Protocol::SingleRelayCoded;
    int n_r = 11;                            // receive-window slots
    std::optional<int> n_s;                  // cooperative sleep window; nullopt = n_r - 1
    SumForm analysis_sum_form = SumForm::Exponential;

    static std::map<int, double> default_sensitivity_table();

    // gamma such that a node at distance_m has `margin_db` of median received
    // power above the sensitivity at `sf` (median of unit-mean exponential
    // fading is ln 2).
    static double gamma_db_for_margin(double margin_db, double distance_m, double alpha,
                                      double sensitivity_dbm);

    // Self-contained defaults: 20 sensors at 2 km from the gateway, relay at
    // 1.2 km, cluster 800 m from the relay, +10 dB median margin on the
    // direct link.
    static ScenarioConfig defaults();

    bool operator==(const ScenarioConfig&) const = default;
};

enum class ConfigErrorCode {
    InvalidWindow,
    SlotTooShort,
    BadSf,
    NegativeRate,
    BadGeometry,
    BadBytes,
    BadValue,
};

struct ConfigError {
    ConfigErrorCode code;
    std::string message;
};

const char* config_error_code_name(ConfigErrorCode code);

struct ValidationResult;
class ValidatedConfig;
ValidationResult validate_config(const ScenarioConfig& cfg);

// A validated scenario with optional fields resolved and derived quantities
// cached. Immutable after construction; safe to share across workers.
class ValidatedConfig {
public:
    const ScenarioConfig& raw() const { return cfg_; }

    int n_sensors() const { return cfg_.n_sensors; }
    double lambda_rate() const { return cfg_.lambda_rate; }
    double slot_len_s() const { return slot_len_s_; }
    Protocol protocol() const { return cfg_.protocol; }
    int n_r() const { return cfg_.n_r; }
    int n_s() const { return n_s_; }
    int sf_sensor() const { return cfg_.sf_sensor; }
    int sf_relay() const { return cfg_.sf_relay; }
    double alpha() const { return cfg_.path_loss_exponent; }
    const Geometry& geometry() const { return cfg_.geometry; }
    SumForm sum_form() const { return cfg_.analysis_sum_form; }

    double gamma_linear() const { return gamma_linear_; }
    double xi_linear() const { return xi_linear_; }
    double sensitivity_mw(int sf) const;

    // On-air payload of one sensor frame (id + seq + measurement).
    int sensor_frame_bytes() const { return cfg_.b_id + cfg_.b_seq + cfg_.b_pl; }
    // Coded-frame payload carrying m messages.
    int coded_frame_bytes(int m) const {
        return cfg_.b_pl + m * (cfg_.b_id + cfg_.b_seq);
    }

    double sensor_frame_airtime_s() const { return sensor_airtime_s_; }
    double relay_frame_airtime_s(int payload_bytes) const;

    // Whole uncoded relay frames that fit in the one-slot transmit window.
    int cap_uncoded() const { return cap_uncoded_; }

    // Relay schedule length in slots (receive + transmit + sleep).
    int cycle_slots() const;

    // Probability that a sensor transmits in a given slot: 1 - exp(-lambda*l_s).
    double p_tx() const;
    // Mean number of interferers, (n - 1) * p_tx.
    double nu() const;

    std::uint32_t seq_modulus() const { return seq_modulus_; }

private:
    friend struct ValidationResult;
    friend ValidationResult validate_config(const ScenarioConfig& cfg);

    ScenarioConfig cfg_;
    double slot_len_s_ = 0.0;
    int n_s_ = 0;
    double gamma_linear_ = 1.0;
    double xi_linear_ = 1.0;
    double sensor_airtime_s_ = 0.0;
    int cap_uncoded_ = 1;
    std::uint32_t seq_modulus_ = 256;
};

struct ValidationResult {
    std::vector<ConfigError> errors;       // every violation, not just the first
    std::vector<std::string> warnings;
    std::optional<ValidatedConfig> config;  // present iff errors is empty

    bool ok() const { return errors.empty(); }
    const ValidatedConfig& value() const;   // throws if !ok()
};

ValidationResult validate_config(const ScenarioConfig& cfg);

// Probability of a transmission from one sensor in any given slot.
double p_tx(double lambda_rate, double slot_len_s);

}  // namespace corelay
