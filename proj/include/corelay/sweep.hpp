#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corelay/analysis.hpp"
#include "corelay/config.hpp"
#include "corelay/sim.hpp"

namespace corelay {

enum class SweepAxis { NR, NSensors, LambdaRate, GammaDb };

const char* sweep_axis_name(SweepAxis axis);
std::optional<SweepAxis> sweep_axis_from_name(const std::string& name);

struct SweepSpec {
    ScenarioConfig base;
    SweepAxis axis = SweepAxis::NR;
    std::vector<double> values;
    std::vector<Protocol> protocols;
    int replications = 5;
    std::uint64_t seed_base = 1;
    std::int64_t slots = 200000;
};

struct ResultRow {
    Protocol protocol = Protocol::NoRelay;
    SweepAxis axis = SweepAxis::NR;
    double axis_value = 0.0;
    int replications = 0;
    std::int64_t slots = 0;
    std::uint64_t seed = 0;  // per-point base; replication r uses mix(seed, r)
    std::optional<double> mlr_analysis;
    std::optional<double> rdc_analysis;
    std::optional<double> mlr_sim;
    std::optional<double> mlr_sim_stderr;
    std::optional<double> rdc_sim;
    bool optimal = false;
    std::string error;
};

// One row per (protocol, axis value), protocols in list order, values in list
// order. Per-point failures land in the row's error column and the sweep
// continues. Independent points run on a bounded worker pool; output order
// does not depend on completion order.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned workers = 0);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string rows_to_json(const std::vector<ResultRow>& rows);

struct ValidatePoint {
    Protocol protocol = Protocol::SingleRelayCoded;
    int n_sensors = 0;
    int n_r = 0;
    std::int64_t slots = 0;
    std::uint64_t seed = 0;
    double mlr_ana = 0.0, mlr_sim = 0.0, mlr_stderr = 0.0, mlr_tol = 0.0;
    double rdc_ana = 0.0, rdc_sim = 0.0, rdc_rel_err = 0.0;
    bool mlr_pass = false, rdc_pass = false;
    std::string status;  // pass | fail | skipped | error
    std::string detail;
};

struct ValidateReport {
    std::vector<ValidatePoint> points;
    bool pass = false;
};

// Cross-validation harness: for each grid point runs the closed-form model
// and a long simulation and checks |mlr_ana - mlr_sim| <= max(0.015,
// 4*stderr) and |rdc_ana - rdc_sim| / rdc_ana <= 3%. Zero-traffic points are
// reported as skipped. The analysis and simulation configs are usually the
// same object; passing different ones exists for negative controls.
ValidateReport run_validation(const ScenarioConfig& analysis_base,
                              const ScenarioConfig& sim_base,
                              const std::vector<int>& n_sensors_grid,
                              const std::vector<int>& n_r_grid,
                              const std::vector<Protocol>& protocols,
                              std::int64_t slots, std::uint64_t seed_base,
                              unsigned workers = 0);

std::string validate_report_to_json(const ValidateReport& report);

// Flat key-value audit document with every intermediate of the chain.
std::string performance_to_json(const PerformanceResult& result,
                                const ValidatedConfig& cfg);

std::string run_metrics_to_json(const RunMetrics& metrics, const ValidatedConfig& cfg);

}  // namespace corelay
