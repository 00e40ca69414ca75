#include "sqisw/config.hpp"

#include <fstream>

#include "sqisw/serialize.hpp"

namespace sqisw {

using nlohmann::json;

DeviceParams RunConfig::device(double delta_mhz) const {
    return DeviceParams::from_mhz(g_mhz, delta_mhz);
}

void RunConfig::validate() const {
    device().validate();
    DeviceParams::from_mhz(g_mhz, delta_off_mhz); // off-detuning sanity bound
    if (noise) noise->validate();
    if (measurement) measurement->validate();
    if (!(pulse_pi_ns > 0.0)) throw config_error("flags.pulse_pi_ns must be positive");
}

namespace {

void check_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw config_error(std::string(what) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok)
            throw config_error(std::string(what) + ": unknown key \"" + item.key() + "\"");
    }
}

double get_number(const json& j, const char* what) {
    if (!j.is_number()) throw config_error(std::string(what) + ": expected a number");
    return j.get<double>();
}

} // namespace

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    check_keys(j, "config", {"device", "noise", "measurement", "shots", "seed", "out", "flags"});

    if (j.contains("device")) {
        const json& d = j.at("device");
        check_keys(d, "device", {"g_mhz", "delta_off_mhz"});
        if (d.contains("g_mhz")) cfg.g_mhz = get_number(d.at("g_mhz"), "device.g_mhz");
        if (d.contains("delta_off_mhz"))
            cfg.delta_off_mhz = get_number(d.at("delta_off_mhz"), "device.delta_off_mhz");
    }

    if (j.contains("noise")) {
        const json& n = j.at("noise");
        if (n.is_null()) {
            cfg.noise.reset();
        } else {
            check_keys(n, "noise", {"t1a_ns", "t1b_ns", "t2a_ns", "t2b_ns", "corr"});
            NoiseModel m;
            if (n.contains("t1a_ns")) m.t1a = get_number(n.at("t1a_ns"), "noise.t1a_ns");
            if (n.contains("t1b_ns")) m.t1b = get_number(n.at("t1b_ns"), "noise.t1b_ns");
            if (n.contains("t2a_ns")) m.t2a = get_number(n.at("t2a_ns"), "noise.t2a_ns");
            if (n.contains("t2b_ns")) m.t2b = get_number(n.at("t2b_ns"), "noise.t2b_ns");
            if (n.contains("corr")) m.corr = get_number(n.at("corr"), "noise.corr");
            cfg.noise = m;
        }
    }

    if (j.contains("measurement")) {
        const json& m = j.at("measurement");
        if (m.is_null())
            cfg.measurement.reset();
        else
            cfg.measurement = measurement_model_from_json(m);
    }

    auto get_u64 = [](const json& v, const char* what) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                       v.get<std::int64_t>() < 0))
            throw config_error(std::string(what) + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
    };

    if (j.contains("shots")) {
        const json& s = j.at("shots");
        if (s.is_string() && s.get<std::string>() == "exact")
            cfg.shots = 0;
        else if (s.is_number_integer())
            cfg.shots = get_u64(s, "shots");
        else
            throw config_error("shots: expected a non-negative integer or \"exact\"");
    }

    if (j.contains("seed")) cfg.seed = get_u64(j.at("seed"), "seed");

    if (j.contains("out")) {
        if (!j.at("out").is_string()) throw config_error("out: expected a string");
        cfg.out = j.at("out").get<std::string>();
    }

    if (j.contains("flags")) {
        const json& f = j.at("flags");
        check_keys(f, "flags", {"calibrate", "project_physical", "finite_pulse", "pulse_pi_ns"});
        auto get_bool = [&](const char* key, bool dflt) {
            if (!f.contains(key)) return dflt;
            if (!f.at(key).is_boolean())
                throw config_error(std::string("flags.") + key + ": expected a boolean");
            return f.at(key).get<bool>();
        };
        cfg.calibrate = get_bool("calibrate", cfg.calibrate);
        cfg.project_physical = get_bool("project_physical", cfg.project_physical);
        cfg.finite_pulse = get_bool("finite_pulse", cfg.finite_pulse);
        if (f.contains("pulse_pi_ns"))
            cfg.pulse_pi_ns = get_number(f.at("pulse_pi_ns"), "flags.pulse_pi_ns");
    }

    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

} // namespace sqisw
