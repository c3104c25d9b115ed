#include "corelay/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "corelay/rng.hpp"

namespace corelay {

using nlohmann::json;

namespace {

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, count == 0 ? 1 : count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

ScenarioConfig apply_axis(ScenarioConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::NR: cfg.n_r = static_cast<int>(std::lround(value)); break;
        case SweepAxis::NSensors: cfg.n_sensors = static_cast<int>(std::lround(value)); break;
        case SweepAxis::LambdaRate: cfg.lambda_rate = value; break;
        case SweepAxis::GammaDb: cfg.gamma_db = value; break;
    }
    return cfg;
}

// Per-point seed: stable under reordering of the sweep and identical for the
// protocols that ignore the receive-window axis, so their rows stay constant.
std::uint64_t point_seed(std::uint64_t seed_base, Protocol protocol, SweepAxis axis,
                         double value) {
    const bool value_matters =
        !(axis == SweepAxis::NR && !protocol_uses_receive_window(protocol));
    const std::uint64_t vbits =
        value_matters ? std::bit_cast<std::uint64_t>(value) : 0x41555441ULL;
    std::uint64_t h = RngStream::fnv1a(protocol_name(protocol));
    h = RngStream::mix(h, static_cast<std::uint64_t>(axis) + 1);
    h = RngStream::mix(h, vbits);
    return RngStream::mix(seed_base ^ h);
}

struct PooledSim {
    double mlr = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = 0.0;
    double rdc = 0.0;
    std::int64_t messages = 0;
};

PooledSim pooled_simulation(const ValidatedConfig& cfg, std::uint64_t seed,
                            int replications, std::int64_t slots) {
    PooledSim out;
    std::vector<double> mlrs;
    double rdc_sum = 0.0;
    double single_stderr = 0.0;
    std::int64_t lost = 0, total = 0;
    for (int r = 0; r < replications; ++r) {
        Simulator sim(cfg, RngStream::mix(seed, r + 1));
        const RunMetrics m = sim.run(slots);
        total += m.messages_generated;
        lost += m.lost;
        rdc_sum += m.rdc_estimate;
        if (m.messages_generated > 0) {
            mlrs.push_back(m.mlr_estimate);
            single_stderr = m.mlr_stderr;
        }
    }
    out.messages = total;
    out.rdc = rdc_sum / replications;
    if (total == 0) return out;
    out.mlr = static_cast<double>(lost) / static_cast<double>(total);
    if (mlrs.size() >= 2) {
        double mean = 0.0;
        for (double v : mlrs) mean += v;
        mean /= mlrs.size();
        double var = 0.0;
        for (double v : mlrs) var += (v - mean) * (v - mean);
        var /= (mlrs.size() - 1);
        out.stderr_ = std::sqrt(var / mlrs.size());
    } else {
        out.stderr_ = single_stderr;
    }
    return out;
}

}  // namespace

const char* sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::NR: return "n_r";
        case SweepAxis::NSensors: return "n_sensors";
        case SweepAxis::LambdaRate: return "lambda_rate";
        case SweepAxis::GammaDb: return "gamma_db";
    }
    return "?";
}

std::optional<SweepAxis> sweep_axis_from_name(const std::string& name) {
    for (SweepAxis a : {SweepAxis::NR, SweepAxis::NSensors, SweepAxis::LambdaRate,
                        SweepAxis::GammaDb}) {
        if (name == sweep_axis_name(a)) return a;
    }
    return std::nullopt;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned workers) {
    if (spec.values.empty()) throw std::invalid_argument("sweep needs a non-empty value list");
    if (spec.protocols.empty()) throw std::invalid_argument("sweep needs at least one protocol");
    if (spec.replications < 1) throw std::invalid_argument("replications must be >= 1");

    std::vector<ResultRow> rows(spec.protocols.size() * spec.values.size());
    for (std::size_t pi = 0; pi < spec.protocols.size(); ++pi) {
        for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
            ResultRow& row = rows[pi * spec.values.size() + vi];
            row.protocol = spec.protocols[pi];
            row.axis = spec.axis;
            row.axis_value = spec.values[vi];
            row.replications = spec.replications;
            row.slots = spec.slots;
            row.seed = point_seed(spec.seed_base, row.protocol, spec.axis, row.axis_value);
        }
    }

    // The chain core does not depend on n_r or protocol, so one Analysis per
    // distinct axis value serves every analysis column of that value.
    std::map<double, std::optional<Analysis>> analysis_cache;
    const bool axis_changes_core = spec.axis != SweepAxis::NR;
    auto analysis_for = [&](double value) -> const Analysis* {
        const double key = axis_changes_core ? value : 0.0;
        auto it = analysis_cache.find(key);
        if (it == analysis_cache.end()) {
            ScenarioConfig cfg = apply_axis(spec.base, spec.axis, value);
            cfg.protocol = Protocol::SingleRelayCoded;
            cfg.n_s.reset();
            const ValidationResult vr = validate_config(cfg);
            it = analysis_cache.emplace(key, std::nullopt).first;
            if (vr.ok()) it->second.emplace(vr.value());
        }
        return it->second ? &*it->second : nullptr;
    };
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi) analysis_for(spec.values[vi]);

    parallel_for(rows.size(), workers, [&](std::size_t i) {
        ResultRow& row = rows[i];
        try {
            ScenarioConfig cfg = apply_axis(spec.base, spec.axis, row.axis_value);
            cfg.protocol = row.protocol;
            cfg.n_s.reset();
            // These two baselines have no receive window; keep their rows
            // constant along an n_r sweep instead of rescaling warmup.
            if (spec.axis == SweepAxis::NR && !protocol_uses_receive_window(row.protocol))
                cfg.n_r = 1;
            const ValidationResult vr = validate_config(cfg);
            if (!vr.ok()) {
                std::string msg;
                for (const auto& e : vr.errors)
                    msg += std::string(config_error_code_name(e.code)) + ": " + e.message + "; ";
                row.error = msg;
                return;
            }
            const ValidatedConfig& v = vr.value();

            if (protocol_has_analysis(row.protocol)) {
                const Analysis* ana = analysis_for(row.axis_value);
                if (ana != nullptr) {
                    const PerformanceResult res =
                        ana->evaluate_for(v.n_r(), row.protocol);
                    row.mlr_analysis = res.mlr;
                    row.rdc_analysis = res.rdc;
                }
            }

            const PooledSim sim =
                pooled_simulation(v, row.seed, row.replications, row.slots);
            if (sim.messages > 0) {
                row.mlr_sim = sim.mlr;
                row.mlr_sim_stderr = sim.stderr_;
            }
            row.rdc_sim = sim.rdc;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    // Mark the minimum-loss receive window per protocol.
    if (spec.axis == SweepAxis::NR) {
        for (std::size_t pi = 0; pi < spec.protocols.size(); ++pi) {
            std::size_t best = SIZE_MAX;
            double best_mlr = 0.0;
            for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
                const ResultRow& row = rows[pi * spec.values.size() + vi];
                if (!row.error.empty()) continue;
                const std::optional<double> mlr =
                    row.mlr_analysis ? row.mlr_analysis : row.mlr_sim;
                if (!mlr) continue;
                if (best == SIZE_MAX || *mlr < best_mlr) {
                    best = pi * spec.values.size() + vi;
                    best_mlr = *mlr;
                }
            }
            if (best != SIZE_MAX) rows[best].optimal = true;
        }
    }
    return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "# corelay-sweep-v1\n";
    out +=
        "protocol,axis,axis_value,replications,slots,seed,mlr_analysis,mlr_sim,"
        "mlr_sim_stderr,rdc_analysis,rdc_sim,optimal,error\n";
    for (const ResultRow& row : rows) {
        out += protocol_name(row.protocol);
        out += ',';
        out += sweep_axis_name(row.axis);
        out += ',';
        out += fmt_double(row.axis_value);
        out += ',';
        out += std::to_string(row.replications);
        out += ',';
        out += std::to_string(row.slots);
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        out += fmt_opt(row.mlr_analysis);
        out += ',';
        out += fmt_opt(row.mlr_sim);
        out += ',';
        out += fmt_opt(row.mlr_sim_stderr);
        out += ',';
        out += fmt_opt(row.rdc_analysis);
        out += ',';
        out += fmt_opt(row.rdc_sim);
        out += ',';
        out += row.optimal ? "1" : "0";
        out += ',';
        out += row.error;
        out += '\n';
    }
    return out;
}

std::string rows_to_json(const std::vector<ResultRow>& rows) {
    json arr = json::array();
    for (const ResultRow& row : rows) {
        json obj;
        obj["schema"] = "corelay-sweep-v1";
        obj["protocol"] = protocol_name(row.protocol);
        obj["axis"] = sweep_axis_name(row.axis);
        obj["axis_value"] = row.axis_value;
        obj["replications"] = row.replications;
        obj["slots"] = row.slots;
        obj["seed"] = row.seed;
        auto put = [&](const char* key, const std::optional<double>& v) {
            if (v)
                obj[key] = *v;
            else
                obj[key] = nullptr;
        };
        put("mlr_analysis", row.mlr_analysis);
        put("mlr_sim", row.mlr_sim);
        put("mlr_sim_stderr", row.mlr_sim_stderr);
        put("rdc_analysis", row.rdc_analysis);
        put("rdc_sim", row.rdc_sim);
        obj["optimal"] = row.optimal;
        obj["error"] = row.error;
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

ValidateReport run_validation(const ScenarioConfig& analysis_base,
                              const ScenarioConfig& sim_base,
                              const std::vector<int>& n_sensors_grid,
                              const std::vector<int>& n_r_grid,
                              const std::vector<Protocol>& protocols,
                              std::int64_t slots, std::uint64_t seed_base,
                              unsigned workers) {
    ValidateReport report;
    struct Task {
        Protocol protocol;
        int n, n_r;
    };
    std::vector<Task> tasks;
    for (Protocol p : protocols)
        for (int n : n_sensors_grid)
            for (int n_r : n_r_grid) tasks.push_back({p, n, n_r});
    report.points.resize(tasks.size());

    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        const Task& task = tasks[i];
        ValidatePoint& pt = report.points[i];
        pt.protocol = task.protocol;
        pt.n_sensors = task.n;
        pt.n_r = task.n_r;
        pt.slots = slots;
        pt.seed = RngStream::mix(seed_base ^ RngStream::fnv1a(protocol_name(task.protocol)),
                                 static_cast<std::uint64_t>(task.n) * 1000 + task.n_r);
        try {
            ScenarioConfig acf = analysis_base;
            acf.protocol = task.protocol;
            acf.n_sensors = task.n;
            acf.n_r = task.n_r;
            acf.n_s.reset();
            ScenarioConfig scf = sim_base;
            scf.protocol = task.protocol;
            scf.n_sensors = task.n;
            scf.n_r = task.n_r;
            scf.n_s.reset();

            const ValidatedConfig va = validate_config(acf).value();
            const ValidatedConfig vs = validate_config(scf).value();

            const Analysis ana(va);
            const PerformanceResult res = ana.evaluate();
            pt.mlr_ana = res.mlr;
            pt.rdc_ana = res.rdc;

            Simulator sim(vs, pt.seed);
            const RunMetrics m = sim.run(slots);
            if (m.messages_generated == 0) {
                pt.status = "skipped";
                pt.detail = "no messages generated";
                return;
            }
            pt.mlr_sim = m.mlr_estimate;
            pt.mlr_stderr = m.mlr_stderr;
            pt.rdc_sim = m.rdc_estimate;

            pt.mlr_tol = std::max(0.015, 4.0 * pt.mlr_stderr);
            pt.mlr_pass = std::abs(pt.mlr_ana - pt.mlr_sim) <= pt.mlr_tol;
            pt.rdc_rel_err = pt.rdc_ana > 0.0
                                 ? std::abs(pt.rdc_ana - pt.rdc_sim) / pt.rdc_ana
                                 : (pt.rdc_sim > 0.0 ? 1.0 : 0.0);
            pt.rdc_pass = pt.rdc_rel_err <= 0.03;
            pt.status = (pt.mlr_pass && pt.rdc_pass) ? "pass" : "fail";
        } catch (const std::exception& e) {
            pt.status = "error";
            pt.detail = e.what();
        }
    });

    report.pass = true;
    for (const ValidatePoint& pt : report.points) {
        if (pt.status == "fail" || pt.status == "error") report.pass = false;
    }
    return report;
}

std::string validate_report_to_json(const ValidateReport& report) {
    json doc;
    doc["schema"] = "corelay-validate-v1";
    doc["pass"] = report.pass;
    json pts = json::array();
    for (const ValidatePoint& pt : report.points) {
        json obj;
        obj["protocol"] = protocol_name(pt.protocol);
        obj["n_sensors"] = pt.n_sensors;
        obj["n_r"] = pt.n_r;
        obj["slots"] = pt.slots;
        obj["seed"] = pt.seed;
        obj["mlr_analysis"] = pt.mlr_ana;
        obj["mlr_sim"] = pt.mlr_sim;
        obj["mlr_stderr"] = pt.mlr_stderr;
        obj["mlr_tolerance"] = pt.mlr_tol;
        obj["mlr_pass"] = pt.mlr_pass;
        obj["rdc_analysis"] = pt.rdc_ana;
        obj["rdc_sim"] = pt.rdc_sim;
        obj["rdc_rel_err"] = pt.rdc_rel_err;
        obj["rdc_pass"] = pt.rdc_pass;
        obj["status"] = pt.status;
        if (!pt.detail.empty()) obj["detail"] = pt.detail;
        pts.push_back(obj);
    }
    doc["points"] = pts;
    return doc.dump(2) + "\n";
}

std::string performance_to_json(const PerformanceResult& result,
                                const ValidatedConfig& cfg) {
    json doc;
    doc["schema"] = "corelay-analysis-v1";
    doc["protocol"] = protocol_name(cfg.protocol());
    doc["n_sensors"] = cfg.n_sensors();
    doc["n_r"] = cfg.n_r();
    doc["slot_len_s"] = cfg.slot_len_s();
    doc["p_tx"] = cfg.p_tx();
    doc["nu"] = result.intermediates.nu;
    doc["s_dir"] = result.intermediates.s_dir;
    doc["s_sr"] = result.intermediates.s_sr;
    doc["s_rg"] = result.intermediates.s_rg;
    doc["s_c"] = result.intermediates.s_c;
    doc["p_gr"] = result.intermediates.p_gr;
    doc["f"] = result.intermediates.f;
    doc["p_rw"] = result.intermediates.p_rw;
    doc["mlr"] = result.mlr;
    doc["rdc"] = result.rdc;
    doc["rdc_schedule"] = result.rdc_schedule;
    doc["l_av_s"] = result.l_av_s;
    doc["warnings"] = result.warnings;
    return doc.dump(2) + "\n";
}

std::string run_metrics_to_json(const RunMetrics& m, const ValidatedConfig& cfg) {
    json doc;
    doc["schema"] = "corelay-simulate-v1";
    doc["protocol"] = protocol_name(cfg.protocol());
    doc["n_sensors"] = cfg.n_sensors();
    doc["n_r"] = cfg.n_r();
    doc["slots"] = m.slots;
    doc["warmup_slots"] = m.warmup_slots;
    doc["cooldown_slots"] = m.cooldown_slots;
    doc["seed"] = m.seed;
    doc["messages_generated"] = m.messages_generated;
    doc["messages_excluded"] = m.messages_excluded;
    doc["delivered_direct"] = m.delivered_direct;
    doc["delivered_via_relay"] = m.delivered_via_relay;
    doc["lost"] = m.lost;
    if (std::isnan(m.mlr_estimate))
        doc["mlr"] = nullptr;
    else
        doc["mlr"] = m.mlr_estimate;
    doc["mlr_stderr"] = m.mlr_stderr;
    doc["rdc"] = m.rdc_estimate;
    doc["relay_airtime_s"] = m.relay_airtime_s;
    doc["total_time_s"] = m.total_time_s;
    doc["seq_wrap_risk"] = m.seq_wrap_risk;
    json audit;
    audit["rw_slots"] = m.audit.rw_slots;
    audit["rw_empty"] = m.audit.rw_empty;
    audit["rw_both"] = m.audit.rw_both;
    audit["rw_relay_only"] = m.audit.rw_relay_only;
    audit["relay_frames_tx"] = m.audit.relay_frames_tx;
    audit["relay_frames_delivered"] = m.audit.relay_frames_delivered;
    audit["decode_recovered"] = m.audit.decode_recovered;
    audit["decode_nothing_new"] = m.audit.decode_nothing_new;
    audit["decode_discarded"] = m.audit.decode_discarded;
    audit["msgs_in_rw"] = m.audit.msgs_in_rw;
    audit["msgs_gwmiss_relayrx_inrw"] = m.audit.msgs_gwmiss_relayrx_inrw;
    audit["uncoded_dropped"] = m.audit.uncoded_dropped;
    doc["audit"] = audit;
    return doc.dump(2) + "\n";
}

}  // namespace corelay
