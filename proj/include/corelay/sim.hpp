#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "corelay/channel.hpp"
#include "corelay/config.hpp"
#include "corelay/rng.hpp"

namespace corelay {

// Identity of a message as it appears on the air: originator plus sequence
// number. Unique only within the decoding horizon (one wrap of seq).
struct WireId {
    int sensor_id = 0;
    std::uint32_t seq = 0;
    auto operator<=>(const WireId&) const = default;
};

struct SensorMessage {
    std::uint64_t uid = 0;  // run-unique handle, assigned in creation order
    WireId id;
    std::int64_t created_slot = -1;  // slot of transmission, -1 until sent
    std::vector<std::uint8_t> payload;
};

// Relay frame carrying the XOR of the messages buffered in one receive
// window plus the identifier list of the summed messages.
struct CodedFrame {
    std::vector<std::uint8_t> xor_payload;
    std::vector<WireId> id_list;
    std::vector<std::uint64_t> uids;  // simulator handles, parallel to id_list
    std::int64_t rw_start_slot = 0;
    int payload_bytes_on_air = 0;
};

enum class RelayPhase { Receive, Transmit, Sleep };

struct RelayState {
    int index = 0;
    int n_r = 1;
    int n_s = 0;
    int cycle = 2;
    int offset = 0;                         // schedule shift in slots
    std::vector<std::uint64_t> buffer;      // uids captured in the current RW
    std::optional<std::uint64_t> pending;   // immediate forwarding only
    double airtime_s = 0.0;

    RelayPhase phase_at(std::int64_t slot) const {
        const int pos = static_cast<int>((slot + offset) % cycle);
        if (pos < n_r) return RelayPhase::Receive;
        if (pos == n_r) return RelayPhase::Transmit;
        return RelayPhase::Sleep;
    }
};

// Delivered messages the gateway can use to strip known payloads out of a
// coded frame. Lookups are scoped to a horizon slot so that a reused
// sequence number from an earlier wrap never matches.
class GatewayStore {
public:
    struct Entry {
        std::uint64_t uid = 0;
        std::int64_t created_slot = 0;
        std::vector<std::uint8_t> payload;
    };

    void insert(const WireId& id, std::uint64_t uid, std::int64_t created_slot,
                std::vector<std::uint8_t> payload);
    const Entry* find(const WireId& id, std::int64_t horizon_start) const;
    void prune_before(std::int64_t slot);
    std::size_t size() const { return entries_.size(); }

private:
    std::map<WireId, Entry> entries_;
};

enum class DecodeKind { Recovered, NothingNew, Discarded };

struct DecodeOutcome {
    DecodeKind kind = DecodeKind::NothingNew;
    int missing = 0;
    std::uint64_t recovered_uid = 0;
    WireId recovered_id;
    std::vector<std::uint8_t> recovered_payload;
};

// Reconstruction rule for one received coded frame: with exactly one summed
// message missing from the store, its payload is the XOR of the frame
// payload and all present payloads; otherwise the frame delivers nothing.
DecodeOutcome decode_coded_frame(const GatewayStore& store, const CodedFrame& frame);

struct RunMetrics {
    std::int64_t slots = 0;
    std::int64_t warmup_slots = 0;
    std::int64_t cooldown_slots = 0;
    std::uint64_t seed = 0;

    // Accounted messages only (outside warmup/cooldown).
    std::int64_t messages_generated = 0;
    std::int64_t messages_excluded = 0;
    std::int64_t delivered_direct = 0;
    std::int64_t delivered_via_relay = 0;
    std::int64_t lost = 0;

    double mlr_estimate = 0.0;
    double mlr_stderr = 0.0;   // batch means over 32 slot ranges
    double rdc_estimate = 0.0; // transmit airtime fraction over the accounting window
    std::vector<double> relay_airtime_s;  // per relay, full run
    double total_time_s = 0.0;
    bool seq_wrap_risk = false;

    struct Audit {
        std::int64_t rw_slots = 0;
        std::int64_t rw_empty = 0;
        std::int64_t rw_both = 0;
        std::int64_t rw_relay_only = 0;
        std::int64_t relay_frames_tx = 0;
        std::int64_t relay_frames_delivered = 0;
        std::int64_t decode_recovered = 0;
        std::int64_t decode_nothing_new = 0;
        std::int64_t decode_discarded = 0;
        std::int64_t msgs_in_rw = 0;
        std::int64_t msgs_gwmiss_relayrx_inrw = 0;
        std::int64_t uncoded_dropped = 0;

        bool operator==(const Audit&) const = default;
    } audit;

    bool operator==(const RunMetrics&) const = default;
};

// Slot-driven engine: Poisson sensors on slotted ALOHA, half-duplex relays
// running one of the five protocols, a gateway demodulating the sensor SF
// and the relay SF concurrently. Deterministic for a given (config, seed).
class Simulator {
public:
    Simulator(const ValidatedConfig& cfg, std::uint64_t seed,
              std::ostream* trace = nullptr);

    void step();

    // Runs until n_slots and finalizes metrics. Messages created during the
    // first `warmup` slots or the last `cooldown` slots are excluded so that
    // edge-truncated relay cycles do not bias the loss rate; -1 picks the
    // schedule-derived defaults.
    RunMetrics run(std::int64_t n_slots, std::int64_t warmup = -1,
                   std::int64_t cooldown = -1);

    std::int64_t current_slot() const { return slot_; }
    const std::vector<RelayState>& relays() const { return relays_; }
    const std::vector<SensorMessage>& messages() const { return messages_; }
    const ValidatedConfig& config() const { return cfg_; }

    std::int64_t default_warmup() const;
    std::int64_t default_cooldown() const;

private:
    struct PerMessage {
        bool transmitted = false;
        bool delivered_direct = false;
        bool delivered_relay = false;
        bool in_rw = false;
        bool gwmiss_relayrx_inrw = false;
    };

    void transmit_sensor_frames(std::vector<std::uint64_t>& frames);
    void relay_receive(const std::vector<std::uint64_t>& frames,
                       std::optional<std::uint64_t> gw_winner);
    void relay_transmit_phase();
    void deliver_direct(std::uint64_t uid);
    void deliver_via_relay(std::uint64_t uid);
    bool relay_frame_reaches_gateway();
    void emit_coded(RelayState& relay);
    void emit_uncoded(RelayState& relay);
    void emit_immediate(RelayState& relay);
    bool relay_listening(const RelayState& relay) const;

    ValidatedConfig cfg_;
    std::uint64_t seed_;
    std::ostream* trace_ = nullptr;

    RngStream traffic_;
    RngStream fading_gw_;
    RngStream fading_relay_;
    RngStream geometry_;
    RngStream tie_break_;

    std::int64_t slot_ = 0;
    std::vector<double> next_arrival_s_;
    std::vector<std::uint32_t> next_seq_;
    std::vector<std::deque<std::uint64_t>> tx_queue_;
    std::vector<double> dist_gw_;
    std::vector<double> dist_relay_;

    std::vector<SensorMessage> messages_;
    std::vector<PerMessage> state_;
    std::vector<RelayState> relays_;
    GatewayStore store_;
    RunMetrics::Audit audit_;
    std::vector<double> relay_airtime_window_;
    std::int64_t window_begin_ = 0;
    std::int64_t window_end_ = 0;

    std::vector<Contender> scratch_contenders_;
};

// Transmit-phase behavior in isolation (unit-testable): which frames a relay
// sends given its buffer. Uncoded forwarding picks a uniform random subset
// of cap_uncoded messages when the buffer exceeds capacity.
std::vector<std::uint64_t> pick_uncoded_subset(const std::vector<std::uint64_t>& buffer,
                                               int cap, RngStream& rng);

CodedFrame build_coded_frame(const std::vector<const SensorMessage*>& buffered,
                             std::int64_t rw_start_slot, int b_pl, int header_bytes);

}  // namespace corelay
