#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "sqisw/dynamics.hpp"
#include "sqisw/measurement.hpp"

namespace sqisw {

// Run configuration. Defaults describe the reference device: g/2pi = 11 MHz,
// off detuning 200 MHz, T1 = 400 ns and T2 = 120 ns on both qubits,
// readout fidelities (0.95, 0.95)/(0.93, 0.93) and crosstalk 0.117.
// A config file overrides per section; "noise": null or "measurement": null
// disable that section entirely (noiseless / ideal readout).
struct RunConfig {
    double g_mhz = 11.0;
    double delta_off_mhz = 200.0;
    std::optional<NoiseModel> noise = NoiseModel{};
    std::optional<MeasurementModel> measurement =
        MeasurementModel{0.95, 0.95, 0.93, 0.93, 0.117, 0.117};
    std::uint64_t shots = 0; // 0 = exact probabilities
    std::uint64_t seed = 1;
    std::string out;
    bool calibrate = true;
    bool project_physical = false;
    bool finite_pulse = false;
    double pulse_pi_ns = 16.0;

    DeviceParams device(double delta_mhz = 0.0) const;
    double pulse_window() const { return finite_pulse ? pulse_pi_ns : 0.0; }
    void validate() const;
};

// Strict parse: unknown keys anywhere are rejected, every referenced-module
// invariant is re-validated.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

} // namespace sqisw
