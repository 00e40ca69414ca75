#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sqisw/linalg.hpp"
#include "sqisw/measurement.hpp"

namespace sqisw {

// Two-qubit basis order {|00>, |01>, |10>, |11>} with qubit A the left
// tensor factor. The frame co-rotates with qubit A; detuning
// delta = w10_A - w10_B enters as a sigma_z term on qubit B.
struct DeviceParams {
    double g = mhz_to_rad_ns(11.0);      // coupling, rad/ns
    double delta = 0.0;                  // detuning, rad/ns
    double omega10 = mhz_to_rad_ns(5500.0); // nominal transition, rad/ns

    static DeviceParams from_mhz(double g_mhz, double delta_mhz = 0.0);
    void validate() const;
};

// Relaxation/dephasing model. corr in [0,1] moves that fraction of the pure
// dephasing rate from the per-qubit sigma_z channels into one common
// (sigma_zA + sigma_zB)/sqrt(2) channel; corr = 0 is fully local dephasing.
struct NoiseModel {
    double t1a = 400.0;
    double t1b = 400.0;
    double t2a = 120.0;
    double t2b = 120.0;
    double corr = 0.0;

    void validate() const;
    double tphi_a() const { return 1.0 / (1.0 / t2a - 0.5 / t1a); }
    double tphi_b() const { return 1.0 / (1.0 / t2b - 0.5 / t1b); }
};

enum class Axis { X, Y, Z };

struct PulseEvent {
    enum class Kind { RotX, RotY, RotZ, Detune, Idle };
    Kind kind = Kind::Idle;
    Qubit qubit = Qubit::A; // rotations only
    double angle = 0.0;     // rad, rotations only
    double delta = 0.0;     // rad/ns, Detune/Idle
    double duration = 0.0;  // ns, Detune/Idle

    static PulseEvent rot(Qubit q, Axis axis, double angle);
    static PulseEvent detune(double delta_rad_ns, double duration_ns);
    static PulseEvent idle(double delta_rad_ns, double duration_ns);
};

struct PulseSequence {
    std::vector<PulseEvent> events;
    std::uint64_t seed = 0;
};

struct EvolveOptions {
    // > 0 enables finite-duration pulses: each rotation stays ideal but is
    // wrapped in decoherence-only evolution totalling pulse_pi_ns*|angle|/pi,
    // split half before and half after the rotation.
    double pulse_pi_ns = 0.0;
};

// g = (Cc/C) * omega10.
double coupling_from_capacitance(double cc_farad, double c_farad, double omega10_rad_s);

// H/hbar = (g/4)(XX + YY) - (delta/2)(I (x) Z).
CMat hamiltonian(const DeviceParams& params);

// expm(-i H t).
CMat ideal_unitary(const DeviceParams& params, double t_ns);

// Half swap (g t = pi/2 at delta = 0): entangling square root of iSWAP.
CMat sqisw_gate();
// Full swap (g t = pi): |01> -> -i|10>, |10> -> -i|01>.
CMat iswap_gate();

Eigen::Matrix2cd rotation_1q(Axis axis, double angle);

// exp(-i angle sigma_axis / 2) on the addressed qubit, identity on the other.
CMat rotation(Qubit q, Axis axis, double angle);

// CNOT (control A) composed as
// Ry_A(-90) [Rx_A(90) Rx_B(-90)] SQiSW Rx_A(180) SQiSW Ry_A(90),
// rightmost factor applied first; equals CNOT up to a global phase.
CMat cnot_from_sqisw();

// Collapse operators: sqrt(1/T1_q) sigma-_q, sqrt((1-corr)/(2 Tphi_q)) sigma_z_q,
// and for corr > 0 one common sqrt(corr/(2 Tphi_bar)) (sigma_zA + sigma_zB)/sqrt(2)
// with Tphi_bar the harmonic mean of the two pure-dephasing times.
std::vector<CMat> collapse_ops(const NoiseModel& noise);

// Column-stacking vectorization: d vec(rho)/dt = L vec(rho).
CMat liouvillian(const CMat& h, const std::vector<CMat>& ls);

// Exact propagator for a constant-H segment: a plain unitary conjugation
// when there are no collapse operators, else expm of the superoperator.
struct Propagator {
    bool unitary = true;
    CMat op; // 4x4 U, or 16x16 superoperator exponential

    CMat apply(const CMat& rho) const;
};

Propagator make_propagator(const CMat& h, const std::vector<CMat>& ls, double t_ns);

CMat lindblad_evolve(const CMat& rho, const DeviceParams& params,
                     const std::optional<NoiseModel>& noise, double t_ns);

// Runs a sequence from |00><00|. Rotations are instantaneous unless
// opts.pulse_pi_ns > 0; Detune/Idle segments evolve under the segment's
// detuning. Accumulated z phases are not auto-compensated; use RotZ events.
CMat run_sequence(const PulseSequence& seq, const DeviceParams& params,
                  const std::optional<NoiseModel>& noise, const EvolveOptions& opts = {});

struct SwapScanPoint {
    double delta = 0.0; // rad/ns
    double tf = 0.0;    // ns
    ProbVector probs;
};

struct SwapScanOptions {
    std::uint64_t shots = 0; // 0 = exact probabilities
    std::uint64_t seed = 1;
    std::optional<MeasurementModel> readout; // applied in sampled mode only
    EvolveOptions evolve;
    int jobs = 1;
};

// For each (delta, tf), delta-major order: prepare |10> by a pi pulse on A,
// evolve at the given detuning for tf, and return outcome probabilities
// (exact, or readout-modelled and sampled when shots > 0).
std::vector<SwapScanPoint> swap_scan(const DeviceParams& params,
                                     const std::optional<NoiseModel>& noise,
                                     const std::vector<double>& tf_ns,
                                     const std::vector<double>& delta_rad_ns,
                                     const SwapScanOptions& opts = {});

} // namespace sqisw
