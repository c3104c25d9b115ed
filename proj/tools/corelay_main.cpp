// corelay command line: closed-form analysis, slot simulation, parameter
// sweeps, receive-window optimization, and the analysis-vs-simulation
// validation harness for LoRa coded-relaying scenarios.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corelay/analysis.hpp"
#include "corelay/scenario_json.hpp"
#include "corelay/sim.hpp"
#include "corelay/sweep.hpp"

namespace {

using namespace corelay;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitValidationFailure = 2;

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) {
            const std::size_t dots = item.find("..");
            if (dots != std::string::npos) {
                const long a = std::stol(item.substr(0, dots));
                const long b = std::stol(item.substr(dots + 2));
                if (b < a) throw CliError("bad range \"" + item + "\"");
                for (long v = a; v <= b; ++v) values.push_back(static_cast<double>(v));
            } else {
                values.push_back(std::stod(item));
            }
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_value_list(text)) out.push_back(static_cast<int>(v));
    return out;
}

std::vector<Protocol> parse_protocols(const std::string& text) {
    if (text == "all")
        return {Protocol::NoRelay, Protocol::ImmediateForwarding,
                Protocol::UncodedForwarding, Protocol::SingleRelayCoded,
                Protocol::Cooperative};
    std::vector<Protocol> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) {
            const auto p = protocol_from_name(item);
            if (!p) throw CliError("unknown protocol \"" + item + "\"");
            out.push_back(*p);
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

void write_output(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw CliError("cannot open output file: " + out_path);
    out << payload;
}

ValidatedConfig load_validated(const std::string& path, std::vector<std::string>* warnings) {
    const ScenarioConfig cfg = load_scenario_file(path);
    ValidationResult vr = validate_config(cfg);
    if (!vr.ok()) {
        std::string msg = "scenario is invalid:";
        for (const auto& e : vr.errors)
            msg += std::string("\n  [") + config_error_code_name(e.code) + "] " + e.message;
        throw CliError(msg);
    }
    if (warnings) *warnings = vr.warnings;
    return vr.value();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded-relaying study tool for LoRa sensor networks"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format = "json";
    std::string trace_path;
    std::uint64_t seed = 1;
    std::int64_t slots = 1000000;

    auto add_common = [&](CLI::App* cmd, bool with_slots) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--seed", seed, "base random seed");
        if (with_slots) cmd->add_option("--slots", slots, "slots to simulate");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "closed-form loss and duty cycle");
    add_common(analyze, false);

    CLI::App* simulate = app.add_subcommand("simulate", "run the slot simulator once");
    add_common(simulate, true);
    simulate->add_option("--trace", trace_path, "write a per-slot event trace");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis over several protocols");
    add_common(sweep, true);
    std::string axis_name = "n_r";
    std::string values_text;
    std::string protocols_text = "all";
    int replications = 5;
    sweep->add_option("--axis", axis_name, "n_r | n_sensors | lambda_rate | gamma_db");
    sweep->add_option("--values", values_text, "list like 1,5,11 or range like 1..15")
        ->required();
    sweep->add_option("--protocols", protocols_text, "comma list or \"all\"");
    sweep->add_option("--replications", replications, "seeds per point");
    sweep->add_option("--format", format, "csv | json");

    CLI::App* optimal = app.add_subcommand("optimal-nr", "scan for the loss-minimizing n_r");
    add_common(optimal, false);
    int n_r_max = 20;
    optimal->add_option("--max-nr", n_r_max, "largest receive window to scan");

    CLI::App* validate = app.add_subcommand("validate", "analysis vs simulation grid check");
    add_common(validate, true);
    std::string grid_n_text = "10,20,40";
    std::string grid_nr_text = "1,5,11";
    validate->add_option("--grid-n", grid_n_text, "sensor counts");
    validate->add_option("--grid-nr", grid_nr_text, "receive windows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*analyze) {
            std::vector<std::string> warnings;
            const ValidatedConfig cfg = load_validated(scenario_path, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            if (!protocol_has_analysis(cfg.protocol()))
                throw CliError(std::string("UnsupportedProtocolForAnalysis: ") +
                               protocol_name(cfg.protocol()) +
                               " is evaluated by simulation only");
            const Analysis analysis(cfg);
            write_output(performance_to_json(analysis.evaluate(), cfg), out_path);
            return kExitOk;
        }

        if (*simulate) {
            std::vector<std::string> warnings;
            const ValidatedConfig cfg = load_validated(scenario_path, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            std::ofstream trace_file;
            std::ostream* trace = nullptr;
            if (!trace_path.empty()) {
                trace_file.open(trace_path);
                if (!trace_file) throw CliError("cannot open trace file: " + trace_path);
                trace = &trace_file;
            }
            Simulator sim(cfg, seed, trace);
            const RunMetrics metrics = sim.run(slots);
            write_output(run_metrics_to_json(metrics, cfg), out_path);
            return kExitOk;
        }

        if (*sweep) {
            SweepSpec spec;
            spec.base = load_scenario_file(scenario_path);
            const auto axis = sweep_axis_from_name(axis_name);
            if (!axis) throw CliError("unknown axis \"" + axis_name + "\"");
            spec.axis = *axis;
            spec.values = parse_value_list(values_text);
            if (spec.values.empty()) throw CliError("--values produced an empty list");
            spec.protocols = parse_protocols(protocols_text);
            spec.replications = replications;
            spec.seed_base = seed;
            spec.slots = slots;
            const std::vector<ResultRow> rows = run_sweep(spec);
            if (format == "csv")
                write_output(rows_to_csv(rows), out_path);
            else if (format == "json")
                write_output(rows_to_json(rows), out_path);
            else
                throw CliError("format must be csv or json");
            return kExitOk;
        }

        if (*optimal) {
            const ValidatedConfig cfg = load_validated(scenario_path, nullptr);
            if (!protocol_has_analysis(cfg.protocol()))
                throw CliError(std::string("UnsupportedProtocolForAnalysis: ") +
                               protocol_name(cfg.protocol()) +
                               " has no closed-form model to scan");
            const Analysis analysis(cfg);
            const OptimalNr best = optimal_nr(analysis, cfg.protocol(), n_r_max);
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "{\n  \"protocol\": \"%s\",\n  \"n_r_opt\": %d,\n"
                          "  \"mlr\": %.10g\n}\n",
                          protocol_name(cfg.protocol()), best.n_r, best.mlr);
            write_output(buf, out_path);
            return kExitOk;
        }

        if (*validate) {
            const ScenarioConfig base = load_scenario_file(scenario_path);
            const ValidateReport report = run_validation(
                base, base, parse_int_list(grid_n_text), parse_int_list(grid_nr_text),
                {Protocol::SingleRelayCoded, Protocol::Cooperative}, slots, seed);
            write_output(validate_report_to_json(report), out_path);
            int pass = 0, fail = 0, skipped = 0;
            for (const auto& pt : report.points) {
                if (pt.status == "pass") ++pass;
                else if (pt.status == "skipped") ++skipped;
                else ++fail;
            }
            std::cerr << "validate: " << pass << " pass, " << fail << " fail, " << skipped
                      << " skipped\n";
            return report.pass ? kExitOk : kExitValidationFailure;
        }
    } catch (const ScenarioParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
