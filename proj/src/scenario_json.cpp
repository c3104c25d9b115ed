#include "corelay/scenario_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace corelay {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& known,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            throw ScenarioParseError("unknown key \"" + it.key() + "\" in " + where);
    }
}

DistanceLaw law_from_json(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ScenarioParseError(where + " must be an object");
    require_keys(obj, {"law", "distance_m", "r_min_m", "r_max_m"}, where);
    const std::string kind = obj.value("law", "");
    if (kind == "fixed") {
        if (!obj.contains("distance_m"))
            throw ScenarioParseError(where + ": fixed law needs distance_m");
        return DistanceLaw::fixed(obj.at("distance_m").get<double>());
    }
    if (kind == "uniform_annulus") {
        if (!obj.contains("r_min_m") || !obj.contains("r_max_m"))
            throw ScenarioParseError(where + ": annulus needs r_min_m and r_max_m");
        return DistanceLaw::annulus(obj.at("r_min_m").get<double>(),
                                    obj.at("r_max_m").get<double>());
    }
    if (kind == "uniform_disc") {
        if (!obj.contains("r_max_m"))
            throw ScenarioParseError(where + ": disc needs r_max_m");
        return DistanceLaw::disc(obj.at("r_max_m").get<double>());
    }
    throw ScenarioParseError(where + ": unknown law \"" + kind + "\"");
}

json law_to_json(const DistanceLaw& law) {
    json obj;
    switch (law.kind) {
        case DistanceLaw::Kind::Fixed:
            obj["law"] = "fixed";
            obj["distance_m"] = law.d;
            break;
        case DistanceLaw::Kind::UniformAnnulus:
            obj["law"] = "uniform_annulus";
            obj["r_min_m"] = law.r_min;
            obj["r_max_m"] = law.r_max;
            break;
        case DistanceLaw::Kind::UniformDisc:
            obj["law"] = "uniform_disc";
            obj["r_max_m"] = law.r_max;
            break;
    }
    return obj;
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioParseError("scenario must be a JSON object");

    static const std::set<std::string> known = {
        "n_sensors", "lambda_rate", "slot_len_s", "sf_sensor", "sf_relay",
        "bandwidth_hz", "coding_rate", "preamble_symbols", "explicit_header",
        "b_pl", "b_id", "b_seq", "path_loss_exponent", "gamma_db",
        "sensitivity_dbm_by_sf", "capture_threshold_db", "geometry", "protocol",
        "n_r", "n_s", "analysis_sum_form"};
    require_keys(doc, known, "scenario");

    ScenarioConfig cfg = ScenarioConfig::defaults();

    auto get = [&](const char* key, auto& field) {
        if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_sensors", cfg.n_sensors);
    get("lambda_rate", cfg.lambda_rate);
    get("sf_sensor", cfg.sf_sensor);
    get("sf_relay", cfg.sf_relay);
    get("bandwidth_hz", cfg.bandwidth_hz);
    get("coding_rate", cfg.coding_rate);
    get("preamble_symbols", cfg.preamble_symbols);
    get("explicit_header", cfg.explicit_header);
    get("b_pl", cfg.b_pl);
    get("b_id", cfg.b_id);
    get("b_seq", cfg.b_seq);
    get("path_loss_exponent", cfg.path_loss_exponent);
    get("gamma_db", cfg.gamma_db);
    get("capture_threshold_db", cfg.capture_threshold_db);
    get("n_r", cfg.n_r);

    if (doc.contains("slot_len_s")) {
        const json& v = doc.at("slot_len_s");
        if (v.is_string()) {
            if (v.get<std::string>() != "auto")
                throw ScenarioParseError("slot_len_s must be a number or \"auto\"");
            cfg.slot_len_s.reset();
        } else {
            cfg.slot_len_s = v.get<double>();
        }
    }
    if (doc.contains("n_s")) {
        const json& v = doc.at("n_s");
        if (v.is_string()) {
            if (v.get<std::string>() != "auto")
                throw ScenarioParseError("n_s must be an integer or \"auto\"");
            cfg.n_s.reset();
        } else {
            cfg.n_s = v.get<int>();
        }
    }
    if (doc.contains("sensitivity_dbm_by_sf")) {
        const json& table = doc.at("sensitivity_dbm_by_sf");
        if (!table.is_object())
            throw ScenarioParseError("sensitivity_dbm_by_sf must map SF -> dBm");
        cfg.sensitivity_dbm_by_sf.clear();
        for (auto it = table.begin(); it != table.end(); ++it) {
            try {
                cfg.sensitivity_dbm_by_sf[std::stoi(it.key())] = it.value().get<double>();
            } catch (const std::exception&) {
                throw ScenarioParseError("bad sensitivity table key \"" + it.key() + "\"");
            }
        }
    }
    if (doc.contains("geometry")) {
        const json& g = doc.at("geometry");
        require_keys(g, {"sensor_to_gateway", "sensor_to_relay", "relay_to_gateway_m"},
                     "geometry");
        if (g.contains("sensor_to_gateway"))
            cfg.geometry.sensor_to_gateway =
                law_from_json(g.at("sensor_to_gateway"), "geometry.sensor_to_gateway");
        if (g.contains("sensor_to_relay"))
            cfg.geometry.sensor_to_relay =
                law_from_json(g.at("sensor_to_relay"), "geometry.sensor_to_relay");
        if (g.contains("relay_to_gateway_m"))
            cfg.geometry.relay_to_gateway_m = g.at("relay_to_gateway_m").get<double>();
    }
    if (doc.contains("protocol")) {
        const std::string name = doc.at("protocol").get<std::string>();
        const auto p = protocol_from_name(name);
        if (!p) throw ScenarioParseError("unknown protocol \"" + name + "\"");
        cfg.protocol = *p;
    }
    if (doc.contains("analysis_sum_form")) {
        const std::string form = doc.at("analysis_sum_form").get<std::string>();
        if (form == "exponential")
            cfg.analysis_sum_form = SumForm::Exponential;
        else if (form == "exact_truncated")
            cfg.analysis_sum_form = SumForm::ExactTruncated;
        else
            throw ScenarioParseError(
                "analysis_sum_form must be \"exponential\" or \"exact_truncated\"");
    }
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
    json doc;
    doc["n_sensors"] = cfg.n_sensors;
    doc["lambda_rate"] = cfg.lambda_rate;
    if (cfg.slot_len_s)
        doc["slot_len_s"] = *cfg.slot_len_s;
    else
        doc["slot_len_s"] = "auto";
    doc["sf_sensor"] = cfg.sf_sensor;
    doc["sf_relay"] = cfg.sf_relay;
    doc["bandwidth_hz"] = cfg.bandwidth_hz;
    doc["coding_rate"] = cfg.coding_rate;
    doc["preamble_symbols"] = cfg.preamble_symbols;
    doc["explicit_header"] = cfg.explicit_header;
    doc["b_pl"] = cfg.b_pl;
    doc["b_id"] = cfg.b_id;
    doc["b_seq"] = cfg.b_seq;
    doc["path_loss_exponent"] = cfg.path_loss_exponent;
    doc["gamma_db"] = cfg.gamma_db;
    json table;
    for (const auto& [sf, dbm] : cfg.sensitivity_dbm_by_sf)
        table[std::to_string(sf)] = dbm;
    doc["sensitivity_dbm_by_sf"] = table;
    doc["capture_threshold_db"] = cfg.capture_threshold_db;
    json g;
    g["sensor_to_gateway"] = law_to_json(cfg.geometry.sensor_to_gateway);
    g["sensor_to_relay"] = law_to_json(cfg.geometry.sensor_to_relay);
    g["relay_to_gateway_m"] = cfg.geometry.relay_to_gateway_m;
    doc["geometry"] = g;
    doc["protocol"] = protocol_name(cfg.protocol);
    doc["n_r"] = cfg.n_r;
    if (cfg.n_s)
        doc["n_s"] = *cfg.n_s;
    else
        doc["n_s"] = "auto";
    doc["analysis_sum_form"] =
        cfg.analysis_sum_form == SumForm::Exponential ? "exponential" : "exact_truncated";
    return doc.dump(2) + "\n";
}

}  // namespace corelay
