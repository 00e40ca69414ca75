#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqisw/dynamics.hpp"
#include "sqisw/linalg.hpp"
#include "sqisw/measurement.hpp"

namespace sqisw {

// Measurement pre-rotation per qubit. The applied unitaries are fixed so the
// measured Bloch component maps onto +sigma_z:
//   I  -> identity,   measures  sigma_z
//   X2 -> Rx(+pi/2),  measures +sigma_y
//   Y2 -> Ry(-pi/2),  measures +sigma_x
enum class PreRotation { I, X2, Y2 };

struct TomoSetting {
    PreRotation a = PreRotation::I;
    PreRotation b = PreRotation::I;
    std::string label() const; // e.g. "I,X2"
};

TomoSetting setting_from_label(const std::string& label);

// The nine settings {I,X2,Y2} x {I,X2,Y2}, A-major.
const std::array<TomoSetting, 9>& qst_settings();

CMat setting_unitary(const TomoSetting& s);

// Exact z-basis outcome probabilities after the setting's pre-rotation.
ProbVector born_probabilities(const CMat& rho, const TomoSetting& s);

// Linear-inversion state tomography: per-setting probabilities are turned
// into Pauli expectations of the unrotated state; single-qubit expectations
// appearing in three settings each are averaged. Hermitian and unit trace by
// construction; possibly unphysical for noisy inputs.
CMat qst_reconstruct(const std::array<ProbVector, 9>& outcomes);

// Clip negative eigenvalues to zero, renormalize the spectrum to sum 1,
// reconstruct. Idempotent.
CMat project_physical(const CMat& rho);

// Input preparation labels per qubit: |0>, |1>, |0>+|1>, |0>+i|1>
// (normalization implied), prepared by I, Rx(pi), Ry(pi/2), Rx(-pi/2).
enum class InputLabel { Zero, One, Plus, PlusI };

struct InputState {
    InputLabel a = InputLabel::Zero;
    InputLabel b = InputLabel::Zero;
    std::string label() const; // e.g. "0+i1,1"
};

InputState input_from_label(const std::string& label);

// The sixteen tomography inputs, A-major in the order {0, 1, +, +i}.
const std::array<InputState, 16>& qpt_inputs();

Eigen::Matrix2cd prep_unitary_1q(InputLabel l);
CMat prep_unitary(const InputState& in);
CMat input_density(const InputState& in);

// Process-matrix operator basis E_m = B_a (x) B_b with B = (I, sx, -i sy, sz)
// and m = 4a + b (qubit A the left factor).
inline const std::string kChiBasis = "I,X,-iY,Z (x) I,X,-iY,Z";
inline const std::string kRhoBasis = "|00>,|01>,|10>,|11>";

const std::array<CMat, 16>& chi_operator_basis();
const std::array<std::string, 16>& chi_element_labels(); // "II", "IX", ...

struct ChiMatrix {
    CMat mat;                      // 16x16, Hermitian for physical processes
    std::string basis = kChiBasis; // declared-basis tag, travels with the data
};

// chi of a unitary: a_m = Tr(E_m^dag U)/4, chi = a a^dag (rank 1, trace 1).
ChiMatrix chi_theory(const CMat& u);

struct QptReconstruction {
    ChiMatrix chi;
    double residual = 0.0; // least-squares residual of the linear inversion
};

// Solves rho_out = sum_mn chi_mn E_m rho_in E_n^dag over the 16 pairs as a
// real linear least-squares problem in the Hermitian parameterization of chi.
// Throws numerical_error if the inputs do not span (Gram-matrix rank check).
QptReconstruction qpt_reconstruct(const std::vector<std::pair<CMat, CMat>>& pairs);

// sum_mn chi_mn E_m rho E_n^dag.
CMat apply_chi(const ChiMatrix& chi, const CMat& rho);

// Max-abs deviation of sum_mn chi_mn E_n^dag E_m from the identity.
double trace_preservation_residual(const ChiMatrix& chi);

// Re Tr(chi_t chi_e); requires equal basis tags, asserts the imaginary
// residual is below 1e-6.
double process_fidelity(const ChiMatrix& chi_t, const ChiMatrix& chi_e);

// T2 = (3 pi + 2) / (16 g Re chi[IZ,IZ]). Throws extraction_error when the
// element is below 1e-4 (noiseless limit: no dephasing signature to read).
double extract_t2(const ChiMatrix& chi, double g_rad_ns);

// kappa = Re chi[IZ,ZI] / Re chi[IZ,IZ] - (pi - 2)/(3 pi + 2).
double extract_kappa(const ChiMatrix& chi);

double state_fidelity(const CMat& rho, const CMat& pure_target);

// ---------------------------------------------------------------------------
// Experiment pipeline
// ---------------------------------------------------------------------------

enum class GateKind { None, SQiSW, ISwap, Cnot };

GateKind gate_from_name(const std::string& name);
std::string gate_name(GateKind kind);

// Ideal composed unitary of the gate (gate timing taken from params.g).
CMat ideal_gate_unitary(GateKind kind);

struct ExperimentOptions {
    std::optional<NoiseModel> noise;
    std::optional<MeasurementModel> readout;
    bool calibrate = true;   // invert the readout model on measured data
    bool project = false;    // project reconstructed states to physical
    double pulse_pi_ns = 0;  // > 0: finite-duration pulses (see conventions)
    std::uint64_t shots = 0; // 0 = exact probabilities
    std::uint64_t seed = 1;
    int jobs = 1;
    bool keep_records = false;
};

struct StateTomographyRun {
    CMat rho;
    double min_eigenvalue = 0.0; // of the raw reconstruction, before projection
    bool negative_flagged = false;
    std::vector<ShotRecord> records;
};

// Prepare the input, apply the gate, run the nine settings, apply the
// readout model / sampling / calibration, reconstruct the state.
StateTomographyRun run_state_tomography(GateKind gate, const InputState& input,
                                        const DeviceParams& params,
                                        const ExperimentOptions& opts);

struct ProcessTomographyRun {
    ChiMatrix chi;
    double residual = 0.0;
    double tp_residual = 0.0;
    bool negative_flagged = false;
    std::vector<ShotRecord> records;
};

// Full 16-input process tomography. Nominal (ideal) input states are paired
// with the reconstructed outputs. Parallel over inputs; per-cell seeds make
// the result independent of the job count.
ProcessTomographyRun run_process_tomography(GateKind gate, const DeviceParams& params,
                                            const ExperimentOptions& opts);

// chi of the bare evolved channel (no measurement pipeline): each nominal
// input is pushed through prep windows + gate exactly.
ChiMatrix channel_chi(GateKind gate, const DeviceParams& params,
                      const std::optional<NoiseModel>& noise, double pulse_pi_ns = 0);

// Classification of chi elements by sensitivity to the two decoherence
// channels (finite differences of the simulated chi w.r.t. 1/T1 and 1/Tphi).
struct FlaggedElement {
    int m = 0;
    int n = 0;
    std::string row;    // element label, e.g. "IZ"
    std::string col;
    double re = 0.0;
    double im = 0.0;
    double magnitude = 0.0;
    std::string classification; // ideal | relaxation | dephasing | mixed
};

std::vector<FlaggedElement> flag_chi_elements(const ChiMatrix& chi, double g_rad_ns,
                                              double threshold);

} // namespace sqisw
