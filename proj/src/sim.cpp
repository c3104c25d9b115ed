#include "corelay/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace corelay {

void GatewayStore::insert(const WireId& id, std::uint64_t uid, std::int64_t created_slot,
                          std::vector<std::uint8_t> payload) {
    Entry& e = entries_[id];
    e.uid = uid;
    e.created_slot = created_slot;
    e.payload = std::move(payload);
}

const GatewayStore::Entry* GatewayStore::find(const WireId& id,
                                              std::int64_t horizon_start) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) return nullptr;
    // Entries older than the horizon belong to a previous wrap of the
    // sequence counter and must not match.
    if (it->second.created_slot < horizon_start) return nullptr;
    return &it->second;
}

void GatewayStore::prune_before(std::int64_t slot) {
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->second.created_slot < slot)
            it = entries_.erase(it);
        else
            ++it;
    }
}

DecodeOutcome decode_coded_frame(const GatewayStore& store, const CodedFrame& frame) {
    DecodeOutcome out;
    std::vector<std::uint8_t> payload = frame.xor_payload;
    int missing = 0;
    std::size_t missing_idx = 0;
    for (std::size_t i = 0; i < frame.id_list.size(); ++i) {
        const GatewayStore::Entry* entry = store.find(frame.id_list[i], frame.rw_start_slot);
        if (entry == nullptr) {
            ++missing;
            missing_idx = i;
            continue;
        }
        if (missing < 2) {
            for (std::size_t b = 0; b < payload.size() && b < entry->payload.size(); ++b)
                payload[b] ^= entry->payload[b];
        }
    }
    out.missing = missing;
    if (missing == 0) {
        out.kind = DecodeKind::NothingNew;
    } else if (missing == 1) {
        out.kind = DecodeKind::Recovered;
        out.recovered_id = frame.id_list[missing_idx];
        if (missing_idx < frame.uids.size()) out.recovered_uid = frame.uids[missing_idx];
        out.recovered_payload = std::move(payload);
    } else {
        out.kind = DecodeKind::Discarded;
    }
    return out;
}

std::vector<std::uint64_t> pick_uncoded_subset(const std::vector<std::uint64_t>& buffer,
                                               int cap, RngStream& rng) {
    if (static_cast<int>(buffer.size()) <= cap) return buffer;
    std::vector<std::uint64_t> pool = buffer;
    for (int j = 0; j < cap; ++j) {
        const std::size_t k = j + rng.uniform_below(pool.size() - j);
        std::swap(pool[j], pool[k]);
    }
    pool.resize(cap);
    return pool;
}

CodedFrame build_coded_frame(const std::vector<const SensorMessage*>& buffered,
                             std::int64_t rw_start_slot, int b_pl, int header_bytes) {
    if (buffered.empty()) throw std::invalid_argument("coded frame needs >= 1 message");
    CodedFrame frame;
    frame.rw_start_slot = rw_start_slot;
    frame.xor_payload.assign(b_pl, 0);
    for (const SensorMessage* msg : buffered) {
        frame.id_list.push_back(msg->id);
        frame.uids.push_back(msg->uid);
        for (std::size_t b = 0; b < frame.xor_payload.size() && b < msg->payload.size(); ++b)
            frame.xor_payload[b] ^= msg->payload[b];
    }
    frame.payload_bytes_on_air =
        b_pl + static_cast<int>(buffered.size()) * header_bytes;
    return frame;
}

Simulator::Simulator(const ValidatedConfig& cfg, std::uint64_t seed, std::ostream* trace)
    : cfg_(cfg),
      seed_(seed),
      trace_(trace),
      traffic_(seed, "traffic"),
      fading_gw_(seed, "fading-gw"),
      fading_relay_(seed, "fading-relay"),
      geometry_(seed, "geometry"),
      tie_break_(seed, "tie-break") {
    const int n = cfg_.n_sensors();
    next_arrival_s_.resize(n);
    next_seq_.assign(n, 0);
    tx_queue_.resize(n);
    dist_gw_.resize(n);
    dist_relay_.resize(n);
    for (int i = 0; i < n; ++i) next_arrival_s_[i] = traffic_.exponential(cfg_.lambda_rate());
    // Static topology: positions are drawn once per run. The two cooperative
    // relays share the per-sensor relay distance (clustered placement).
    for (int i = 0; i < n; ++i) {
        dist_gw_[i] = cfg_.geometry().sensor_to_gateway.sample(geometry_);
        dist_relay_[i] = cfg_.geometry().sensor_to_relay.sample(geometry_);
    }

    const Protocol p = cfg_.protocol();
    if (p == Protocol::SingleRelayCoded || p == Protocol::UncodedForwarding) {
        RelayState r;
        r.index = 0;
        r.n_r = cfg_.n_r();
        r.n_s = 0;
        r.cycle = cfg_.n_r() + 1;
        r.offset = 0;
        relays_.push_back(r);
    } else if (p == Protocol::Cooperative) {
        for (int k = 0; k < 2; ++k) {
            RelayState r;
            r.index = k;
            r.n_r = cfg_.n_r();
            r.n_s = cfg_.n_s();
            r.cycle = cfg_.n_r() + 1 + cfg_.n_s();
            r.offset = k * cfg_.n_r();
            relays_.push_back(r);
        }
    } else if (p == Protocol::ImmediateForwarding) {
        RelayState r;
        r.index = 0;
        r.n_r = 1;
        r.cycle = 2;
        relays_.push_back(r);
    }
    relay_airtime_window_.assign(relays_.size(), 0.0);
}

std::int64_t Simulator::default_warmup() const {
    const int nr_eff = protocol_uses_receive_window(cfg_.protocol()) ? cfg_.n_r() : 1;
    return 2 * (nr_eff + 1);
}

std::int64_t Simulator::default_cooldown() const {
    const int nr_eff = protocol_uses_receive_window(cfg_.protocol()) ? cfg_.n_r() : 1;
    return 2 * (nr_eff + cfg_.n_s() + 1);
}

bool Simulator::relay_listening(const RelayState& relay) const {
    if (cfg_.protocol() == Protocol::ImmediateForwarding) return !relay.pending;
    return relay.phase_at(slot_) == RelayPhase::Receive;
}

void Simulator::deliver_direct(std::uint64_t uid) {
    PerMessage& st = state_[uid];
    if (st.delivered_direct || st.delivered_relay) return;
    st.delivered_direct = true;
    const SensorMessage& msg = messages_[uid];
    if (protocol_has_analysis(cfg_.protocol()))
        store_.insert(msg.id, uid, msg.created_slot, msg.payload);
    if (trace_)
        *trace_ << "slot=" << slot_ << " ev=gw_delivery path=direct sensor="
                << msg.id.sensor_id << " seq=" << msg.id.seq << "\n";
}

void Simulator::deliver_via_relay(std::uint64_t uid) {
    PerMessage& st = state_[uid];
    if (st.delivered_direct || st.delivered_relay) return;
    st.delivered_relay = true;
    const SensorMessage& msg = messages_[uid];
    if (trace_)
        *trace_ << "slot=" << slot_ << " ev=gw_delivery path=relay sensor="
                << msg.id.sensor_id << " seq=" << msg.id.seq << "\n";
}

void Simulator::step() {
    const double slot_start = static_cast<double>(slot_) * cfg_.slot_len_s();
    const double zeta_sensor = cfg_.sensitivity_mw(cfg_.sf_sensor());
    const double zeta_relay_sf = cfg_.sensitivity_mw(cfg_.sf_relay());
    const double alpha = cfg_.alpha();
    const double gamma = cfg_.gamma_linear();
    const double xi_db = cfg_.raw().capture_threshold_db;

    // 1. Sensors with pending arrivals emit frames, one per sensor per slot.
    std::vector<std::uint64_t> frames;
    for (int i = 0; i < cfg_.n_sensors(); ++i) {
        while (next_arrival_s_[i] < slot_start) {
            SensorMessage msg;
            msg.uid = messages_.size();
            msg.id = {i, next_seq_[i]};
            next_seq_[i] = (next_seq_[i] + 1) % cfg_.seq_modulus();
            msg.payload.resize(cfg_.raw().b_pl);
            for (auto& byte : msg.payload)
                byte = static_cast<std::uint8_t>(traffic_.next_u64() & 0xFF);
            messages_.push_back(std::move(msg));
            state_.push_back({});
            tx_queue_[i].push_back(messages_.back().uid);
            next_arrival_s_[i] += traffic_.exponential(cfg_.lambda_rate());
        }
        if (!tx_queue_[i].empty()) {
            const std::uint64_t uid = tx_queue_[i].front();
            tx_queue_[i].pop_front();
            messages_[uid].created_slot = slot_;
            state_[uid].transmitted = true;
            frames.push_back(uid);
            if (trace_)
                *trace_ << "slot=" << slot_ << " ev=sensor_tx sensor=" << i
                        << " seq=" << messages_[uid].id.seq << "\n";
        }
    }

    // 2. Per-receiver capture resolution with independent fading draws.
    std::optional<std::uint64_t> gw_winner;
    if (!frames.empty()) {
        scratch_contenders_.clear();
        for (std::uint64_t uid : frames) {
            const double a = fading_gw_.rayleigh_power();
            const double p =
                rx_power_mw(gamma, a, dist_gw_[messages_[uid].id.sensor_id], alpha);
            scratch_contenders_.push_back({uid, p});
        }
        gw_winner = resolve_capture(scratch_contenders_, zeta_sensor, xi_db);
        if (trace_ && gw_winner) {
            double power = 0.0;
            for (const Contender& c : scratch_contenders_)
                if (c.frame_id == *gw_winner) power = c.rx_power_mw;
            *trace_ << "slot=" << slot_ << " ev=gw_rx sensor="
                    << messages_[*gw_winner].id.sensor_id << " seq="
                    << messages_[*gw_winner].id.seq
                    << " power_dbm=" << mw_to_dbm(power) << "\n";
        }
    }

    int listeners = 0;
    const bool rw_protocol = protocol_uses_receive_window(cfg_.protocol());
    for (RelayState& relay : relays_) {
        if (!relay_listening(relay)) continue;
        ++listeners;
        std::optional<std::uint64_t> relay_winner;
        if (!frames.empty()) {
            scratch_contenders_.clear();
            for (std::uint64_t uid : frames) {
                const double a = fading_relay_.rayleigh_power();
                const double p =
                    rx_power_mw(gamma, a, dist_relay_[messages_[uid].id.sensor_id], alpha);
                scratch_contenders_.push_back({uid, p});
            }
            relay_winner = resolve_capture(scratch_contenders_, zeta_sensor, xi_db);
        }
        if (rw_protocol) {
            ++audit_.rw_slots;
            if (!relay_winner)
                ++audit_.rw_empty;
            else if (gw_winner == relay_winner)
                ++audit_.rw_both;
            else
                ++audit_.rw_relay_only;
        }
        if (relay_winner) {
            if (cfg_.protocol() == Protocol::ImmediateForwarding) {
                relay.pending = *relay_winner;
            } else {
                relay.buffer.push_back(*relay_winner);
            }
            if (gw_winner != relay_winner)
                state_[*relay_winner].gwmiss_relayrx_inrw = true;
            if (trace_) {
                double power = 0.0;
                for (const Contender& c : scratch_contenders_)
                    if (c.frame_id == *relay_winner) power = c.rx_power_mw;
                *trace_ << "slot=" << slot_ << " ev=relay_rx relay=" << relay.index
                        << " sensor=" << messages_[*relay_winner].id.sensor_id
                        << " power_dbm=" << mw_to_dbm(power) << "\n";
            }
        }
    }
    if (cfg_.protocol() == Protocol::Cooperative && listeners != 1)
        throw std::logic_error("cooperative schedule lost its every-slot listener");
    if (rw_protocol && listeners > 0) {
        for (std::uint64_t uid : frames) state_[uid].in_rw = true;
    }

    // 3. Relays in a transmit phase emit frames per protocol.
    struct RelayTx {
        int relay;
        std::optional<CodedFrame> coded;
        std::uint64_t message_uid = 0;
        double airtime = 0.0;
    };
    std::vector<RelayTx> outgoing;
    int transmitting = 0;
    for (RelayState& relay : relays_) {
        switch (cfg_.protocol()) {
            case Protocol::SingleRelayCoded:
            case Protocol::Cooperative: {
                if (relay.phase_at(slot_) != RelayPhase::Transmit) break;
                ++transmitting;
                if (relay.buffer.empty()) break;
                std::vector<const SensorMessage*> buffered;
                for (std::uint64_t uid : relay.buffer) buffered.push_back(&messages_[uid]);
                RelayTx tx;
                tx.relay = relay.index;
                tx.coded = build_coded_frame(buffered, slot_ - relay.n_r, cfg_.raw().b_pl,
                                             cfg_.raw().b_id + cfg_.raw().b_seq);
                tx.airtime =
                    cfg_.relay_frame_airtime_s(tx.coded->payload_bytes_on_air);
                outgoing.push_back(std::move(tx));
                break;
            }
            case Protocol::UncodedForwarding: {
                if (relay.phase_at(slot_) != RelayPhase::Transmit) break;
                ++transmitting;
                if (relay.buffer.empty()) break;
                const auto selected =
                    pick_uncoded_subset(relay.buffer, cfg_.cap_uncoded(), tie_break_);
                audit_.uncoded_dropped +=
                    static_cast<std::int64_t>(relay.buffer.size() - selected.size());
                for (std::uint64_t uid : selected) {
                    RelayTx tx;
                    tx.relay = relay.index;
                    tx.message_uid = uid;
                    tx.airtime = cfg_.relay_frame_airtime_s(cfg_.sensor_frame_bytes());
                    outgoing.push_back(tx);
                }
                break;
            }
            case Protocol::ImmediateForwarding: {
                // `pending` was set in an earlier slot; a message captured in
                // step 2 of this slot is forwarded next slot.
                if (!relay.pending) break;
                const std::uint64_t uid = *relay.pending;
                if (messages_[uid].created_slot == slot_) break;  // captured just now
                ++transmitting;
                RelayTx tx;
                tx.relay = relay.index;
                tx.message_uid = uid;
                tx.airtime = cfg_.relay_frame_airtime_s(cfg_.sensor_frame_bytes());
                outgoing.push_back(tx);
                relay.pending.reset();
                break;
            }
            case Protocol::NoRelay:
                break;
        }
    }
    if (transmitting > 1)
        throw std::logic_error("relay transmit windows overlap");

    // 4. Gateway ingest: direct winner, then relay frames (different SF, so
    // both can succeed in the same slot; relay frames only face fading).
    if (gw_winner) deliver_direct(*gw_winner);
    const bool in_window = slot_ >= window_begin_ && slot_ < window_end_;
    for (RelayTx& tx : outgoing) {
        relays_[tx.relay].airtime_s += tx.airtime;
        if (in_window) relay_airtime_window_[tx.relay] += tx.airtime;
        ++audit_.relay_frames_tx;
        const double a = fading_gw_.rayleigh_power();
        const double p =
            rx_power_mw(gamma, a, cfg_.geometry().relay_to_gateway_m, alpha);
        if (trace_)
            *trace_ << "slot=" << slot_ << " ev=relay_tx relay=" << tx.relay
                    << " kind=" << (tx.coded ? "coded" : "plain")
                    << " power_dbm=" << mw_to_dbm(p) << "\n";
        if (p < zeta_relay_sf) continue;
        ++audit_.relay_frames_delivered;
        if (!tx.coded) {
            deliver_via_relay(tx.message_uid);
            continue;
        }
        const DecodeOutcome outcome = decode_coded_frame(store_, *tx.coded);
        switch (outcome.kind) {
            case DecodeKind::NothingNew:
                ++audit_.decode_nothing_new;
                break;
            case DecodeKind::Discarded:
                ++audit_.decode_discarded;
                break;
            case DecodeKind::Recovered: {
                ++audit_.decode_recovered;
                const std::uint64_t uid = outcome.recovered_uid;
                if (state_[uid].delivered_direct || state_[uid].delivered_relay)
                    throw std::logic_error("recovered a message the gateway already had");
                if (outcome.recovered_payload != messages_[uid].payload)
                    throw std::logic_error("recovered payload differs from the original");
                deliver_via_relay(uid);
                store_.insert(messages_[uid].id, uid, messages_[uid].created_slot,
                              messages_[uid].payload);
                break;
            }
        }
    }

    // 5. Phases advance; buffers clear at every receive-window start.
    ++slot_;
    for (RelayState& relay : relays_) {
        if (cfg_.protocol() == Protocol::ImmediateForwarding) continue;
        if (!relay.buffer.empty() &&
            (slot_ + relay.offset) % relay.cycle == 0)
            relay.buffer.clear();
    }
    if (slot_ % 256 == 0 && protocol_has_analysis(cfg_.protocol()))
        store_.prune_before(slot_ - 2 * (cfg_.n_r() + cfg_.n_s() + 2) - 4);
}

RunMetrics Simulator::run(std::int64_t n_slots, std::int64_t warmup,
                          std::int64_t cooldown) {
    if (slot_ != 0) throw std::logic_error("run() must start from a fresh simulator");
    if (warmup < 0) warmup = default_warmup();
    if (cooldown < 0) cooldown = default_cooldown();
    if (n_slots <= warmup + cooldown)
        throw std::invalid_argument("n_slots must exceed warmup + cooldown");

    window_begin_ = warmup;
    window_end_ = n_slots - cooldown;
    while (slot_ < n_slots) step();

    RunMetrics m;
    m.slots = n_slots;
    m.warmup_slots = warmup;
    m.cooldown_slots = cooldown;
    m.seed = seed_;
    m.total_time_s = static_cast<double>(n_slots) * cfg_.slot_len_s();
    m.seq_wrap_risk = cfg_.cycle_slots() >= static_cast<int>(cfg_.seq_modulus());
    m.audit = audit_;

    for (const RelayState& relay : relays_) m.relay_airtime_s.push_back(relay.airtime_s);
    double window_airtime = 0.0;
    for (double t : relay_airtime_window_) window_airtime += t;
    const double window_time =
        static_cast<double>(window_end_ - window_begin_) * cfg_.slot_len_s();
    m.rdc_estimate = window_time > 0 ? window_airtime / window_time : 0.0;

    // Loss accounting over accounted messages, batch means over 32 slot
    // ranges for the standard error.
    constexpr int kBatches = 32;
    std::vector<std::int64_t> batch_n(kBatches, 0), batch_lost(kBatches, 0);
    const double window_slots = static_cast<double>(window_end_ - window_begin_);
    for (std::size_t uid = 0; uid < messages_.size(); ++uid) {
        const SensorMessage& msg = messages_[uid];
        const PerMessage& st = state_[uid];
        const bool accounted =
            st.transmitted && msg.created_slot >= window_begin_ && msg.created_slot < window_end_;
        if (!accounted) {
            ++m.messages_excluded;
            continue;
        }
        ++m.messages_generated;
        if (st.in_rw) ++m.audit.msgs_in_rw;
        if (st.gwmiss_relayrx_inrw) ++m.audit.msgs_gwmiss_relayrx_inrw;
        int batch = static_cast<int>(static_cast<double>(msg.created_slot - window_begin_) /
                                     window_slots * kBatches);
        batch = std::clamp(batch, 0, kBatches - 1);
        ++batch_n[batch];
        if (st.delivered_direct) {
            ++m.delivered_direct;
        } else if (st.delivered_relay) {
            ++m.delivered_via_relay;
        } else {
            ++m.lost;
            ++batch_lost[batch];
        }
    }

    if (m.messages_generated != m.delivered_direct + m.delivered_via_relay + m.lost)
        throw std::logic_error("message conservation violated");

    if (m.messages_generated > 0) {
        const double n_total = static_cast<double>(m.messages_generated);
        m.mlr_estimate = static_cast<double>(m.lost) / n_total;
        double var = 0.0;
        int used = 0;
        for (int b = 0; b < kBatches; ++b) {
            if (batch_n[b] == 0) continue;
            ++used;
            const double pb = static_cast<double>(batch_lost[b]) / batch_n[b];
            const double w = static_cast<double>(batch_n[b]) / n_total;
            var += w * w * (pb - m.mlr_estimate) * (pb - m.mlr_estimate);
        }
        m.mlr_stderr = used > 1 ? std::sqrt(var * used / (used - 1)) : 0.0;
    } else {
        m.mlr_estimate = std::numeric_limits<double>::quiet_NaN();
        m.mlr_stderr = 0.0;
    }
    return m;
}

}  // namespace corelay
