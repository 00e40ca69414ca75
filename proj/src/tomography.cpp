#include "sqisw/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sqisw/parallel.hpp"

namespace sqisw {

namespace {

const char* pre_rotation_name(PreRotation r) {
    switch (r) {
        case PreRotation::I: return "I";
        case PreRotation::X2: return "X2";
        default: return "Y2";
    }
}

PreRotation pre_rotation_from_name(const std::string& s) {
    if (s == "I") return PreRotation::I;
    if (s == "X2") return PreRotation::X2;
    if (s == "Y2") return PreRotation::Y2;
    throw config_error("unknown tomography setting token: " + s);
}

Eigen::Matrix2cd pre_rotation_unitary(PreRotation r) {
    switch (r) {
        case PreRotation::I: return Eigen::Matrix2cd::Identity();
        case PreRotation::X2: return rotation_1q(Axis::X, kPi / 2);
        default: return rotation_1q(Axis::Y, -kPi / 2);
    }
}

const CMat& measured_pauli(PreRotation r) {
    switch (r) {
        case PreRotation::I: return pauli_z();
        case PreRotation::X2: return pauli_y();
        default: return pauli_x();
    }
}

double pre_rotation_angle(PreRotation r) { return r == PreRotation::I ? 0.0 : kPi / 2; }

} // namespace

std::string TomoSetting::label() const {
    return std::string(pre_rotation_name(a)) + "," + pre_rotation_name(b);
}

TomoSetting setting_from_label(const std::string& label) {
    const auto comma = label.find(',');
    if (comma == std::string::npos) throw config_error("setting label needs a comma: " + label);
    return {pre_rotation_from_name(label.substr(0, comma)),
            pre_rotation_from_name(label.substr(comma + 1))};
}

const std::array<TomoSetting, 9>& qst_settings() {
    static const std::array<TomoSetting, 9> s = [] {
        std::array<TomoSetting, 9> out;
        const PreRotation order[3] = {PreRotation::I, PreRotation::X2, PreRotation::Y2};
        for (int ia = 0; ia < 3; ++ia)
            for (int ib = 0; ib < 3; ++ib) out[3 * ia + ib] = {order[ia], order[ib]};
        return out;
    }();
    return s;
}

CMat setting_unitary(const TomoSetting& s) {
    return kron(CMat(pre_rotation_unitary(s.a)), CMat(pre_rotation_unitary(s.b)));
}

ProbVector born_probabilities(const CMat& rho, const TomoSetting& s) {
    const CMat u = setting_unitary(s);
    const CMat r = u * rho * u.adjoint();
    return {std::real(r(0, 0)), std::real(r(1, 1)), std::real(r(2, 2)), std::real(r(3, 3)),
            false};
}

CMat qst_reconstruct(const std::array<ProbVector, 9>& outcomes) {
    const PreRotation order[3] = {PreRotation::I, PreRotation::X2, PreRotation::Y2};

    double corr[3][3];
    double single_a[3] = {0, 0, 0};
    double single_b[3] = {0, 0, 0};
    for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
            const ProbVector& p = outcomes[3 * ia + ib];
            corr[ia][ib] = p.p00 - p.p01 - p.p10 + p.p11;
            single_a[ia] += (p.p00 + p.p01 - p.p10 - p.p11) / 3.0;
            single_b[ib] += (p.p00 - p.p01 + p.p10 - p.p11) / 3.0;
        }
    }

    CMat rho = id4() / 4.0;
    for (int ia = 0; ia < 3; ++ia) {
        rho += single_a[ia] * kron(measured_pauli(order[ia]), id2()) / 4.0;
        rho += single_b[ia] * kron(id2(), measured_pauli(order[ia])) / 4.0;
        for (int ib = 0; ib < 3; ++ib)
            rho += corr[ia][ib] * kron(measured_pauli(order[ia]), measured_pauli(order[ib])) / 4.0;
    }
    return rho;
}

CMat project_physical(const CMat& rho) {
    if (!is_hermitian(rho, 1e-9))
        throw std::invalid_argument("project_physical: input must be Hermitian");
    if (std::abs(std::real(rho.trace()) - 1.0) > 1e-9 || std::abs(std::imag(rho.trace())) > 1e-9)
        throw std::invalid_argument("project_physical: input must have unit trace");

    EighResult e = eigh(rho, 1e-9);
    Eigen::VectorXd lam = e.values.cwiseMax(0.0);
    const double total = lam.sum();
    if (total <= 0.0) throw numerical_error("project_physical: all-negative spectrum");
    lam /= total;
    return e.vectors * lam.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

namespace {

const char* input_name(InputLabel l) {
    switch (l) {
        case InputLabel::Zero: return "0";
        case InputLabel::One: return "1";
        case InputLabel::Plus: return "0+1";
        default: return "0+i1";
    }
}

InputLabel input_label_from_token(const std::string& s) {
    if (s == "0") return InputLabel::Zero;
    if (s == "1") return InputLabel::One;
    if (s == "0+1" || s == "+") return InputLabel::Plus;
    if (s == "0+i1" || s == "i") return InputLabel::PlusI;
    throw config_error("unknown input-state token: " + s);
}

double prep_angle(InputLabel l) {
    switch (l) {
        case InputLabel::Zero: return 0.0;
        case InputLabel::One: return kPi;
        default: return kPi / 2;
    }
}

} // namespace

std::string InputState::label() const {
    return std::string(input_name(a)) + "," + input_name(b);
}

InputState input_from_label(const std::string& label) {
    const auto comma = label.find(',');
    if (comma != std::string::npos)
        return {input_label_from_token(label.substr(0, comma)),
                input_label_from_token(label.substr(comma + 1))};
    if (label.size() == 2)
        return {input_label_from_token(label.substr(0, 1)),
                input_label_from_token(label.substr(1, 1))};
    throw config_error("input-state label must be two comma-separated tokens or two "
                       "single-character tokens: " + label);
}

const std::array<InputState, 16>& qpt_inputs() {
    static const std::array<InputState, 16> inputs = [] {
        std::array<InputState, 16> out;
        const InputLabel order[4] = {InputLabel::Zero, InputLabel::One, InputLabel::Plus,
                                     InputLabel::PlusI};
        for (int ia = 0; ia < 4; ++ia)
            for (int ib = 0; ib < 4; ++ib) out[4 * ia + ib] = {order[ia], order[ib]};
        return out;
    }();
    return inputs;
}

Eigen::Matrix2cd prep_unitary_1q(InputLabel l) {
    switch (l) {
        case InputLabel::Zero: return Eigen::Matrix2cd::Identity();
        case InputLabel::One: return rotation_1q(Axis::X, kPi);
        case InputLabel::Plus: return rotation_1q(Axis::Y, kPi / 2);
        default: return rotation_1q(Axis::X, -kPi / 2);
    }
}

CMat prep_unitary(const InputState& in) {
    return kron(CMat(prep_unitary_1q(in.a)), CMat(prep_unitary_1q(in.b)));
}

CMat input_density(const InputState& in) {
    CVec psi = CVec::Zero(4);
    psi(0) = 1.0;
    const CVec prepared = prep_unitary(in) * psi;
    return prepared * prepared.adjoint();
}

const std::array<CMat, 16>& chi_operator_basis() {
    static const std::array<CMat, 16> basis = [] {
        const CMat b1[4] = {id2(), pauli_x(), Complex(0, -1) * pauli_y(), pauli_z()};
        std::array<CMat, 16> out;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out[4 * a + b] = kron(b1[a], b1[b]);
        return out;
    }();
    return basis;
}

const std::array<std::string, 16>& chi_element_labels() {
    static const std::array<std::string, 16> labels = [] {
        const char* one = "IXYZ";
        std::array<std::string, 16> out;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out[4 * a + b] = {one[a], one[b]};
        return out;
    }();
    return labels;
}

namespace {
constexpr int kIZ = 3;  // (a=I, b=Z)
constexpr int kZI = 12; // (a=Z, b=I)
} // namespace

ChiMatrix chi_theory(const CMat& u) {
    if (u.rows() != 4 || u.cols() != 4)
        throw std::invalid_argument("chi_theory: 4x4 unitary required");
    if (max_abs(CMat(u.adjoint() * u) - id4()) > 1e-9)
        throw std::invalid_argument("chi_theory: input is not unitary");

    const auto& basis = chi_operator_basis();
    CVec a(16);
    for (int m = 0; m < 16; ++m) a(m) = (basis[m].adjoint() * u).trace() / 4.0;
    ChiMatrix chi;
    chi.mat = a * a.adjoint();
    return chi;
}

QptReconstruction qpt_reconstruct(const std::vector<std::pair<CMat, CMat>>& pairs) {
    const int n_in = static_cast<int>(pairs.size());
    if (n_in != 16) throw std::invalid_argument("qpt_reconstruct: 16 input/output pairs required");

    // Inputs must span the 16-dimensional operator space.
    CMat gram(n_in, n_in);
    for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_in; ++j)
            gram(i, j) = (pairs[i].first.adjoint() * pairs[j].first).trace();
    const EighResult ge = eigh(gram, 1e-8);
    if (ge.values.minCoeff() < 1e-10 * ge.values.maxCoeff())
        throw numerical_error("qpt_reconstruct: input states are not linearly independent");

    const auto& basis = chi_operator_basis();

    // Hermitian parameterization: 16 real diagonal entries, then (re, im)
    // for each m < n pair; 256 real unknowns against 512 real equations.
    std::vector<std::pair<int, int>> off;
    off.reserve(120);
    for (int m = 0; m < 16; ++m)
        for (int n = m + 1; n < 16; ++n) off.emplace_back(m, n);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(32 * n_in, 256);
    Eigen::VectorXd b(32 * n_in);

    for (int k = 0; k < n_in; ++k) {
        std::array<CMat, 16> e_rho;
        for (int m = 0; m < 16; ++m) e_rho[m] = basis[m] * pairs[k].first;

        auto put = [&](int col, const CMat& contrib) {
            for (int idx = 0; idx < 16; ++idx) {
                const Complex v = contrib(idx % 4, idx / 4); // column-major entry order
                a(32 * k + 2 * idx, col) = std::real(v);
                a(32 * k + 2 * idx + 1, col) = std::imag(v);
            }
        };

        for (int m = 0; m < 16; ++m) put(m, CMat(e_rho[m] * basis[m].adjoint()));
        for (std::size_t c = 0; c < off.size(); ++c) {
            const auto [m, n] = off[c];
            const CMat gmn = e_rho[m] * basis[n].adjoint();
            const CMat gnm = e_rho[n] * basis[m].adjoint();
            put(16 + 2 * static_cast<int>(c), CMat(gmn + gnm));
            put(16 + 2 * static_cast<int>(c) + 1, CMat(Complex(0, 1) * (gmn - gnm)));
        }
        for (int idx = 0; idx < 16; ++idx) {
            const Complex v = pairs[k].second(idx % 4, idx / 4);
            b(32 * k + 2 * idx) = std::real(v);
            b(32 * k + 2 * idx + 1) = std::imag(v);
        }
    }

    const Eigen::VectorXd t = lstsq(a, b);

    QptReconstruction out;
    out.chi.mat = CMat::Zero(16, 16);
    for (int m = 0; m < 16; ++m) out.chi.mat(m, m) = t(m);
    for (std::size_t c = 0; c < off.size(); ++c) {
        const auto [m, n] = off[c];
        const Complex v(t(16 + 2 * c), t(16 + 2 * c + 1));
        out.chi.mat(m, n) = v;
        out.chi.mat(n, m) = std::conj(v);
    }
    out.residual = (a * t - b).norm();
    return out;
}

CMat apply_chi(const ChiMatrix& chi, const CMat& rho) {
    const auto& basis = chi_operator_basis();
    CMat out = CMat::Zero(4, 4);
    for (int m = 0; m < 16; ++m) {
        if (chi.mat.row(m).isZero(0)) continue;
        const CMat left = basis[m] * rho;
        for (int n = 0; n < 16; ++n) {
            const Complex c = chi.mat(m, n);
            if (c == Complex(0, 0)) continue;
            out += c * left * basis[n].adjoint();
        }
    }
    return out;
}

double trace_preservation_residual(const ChiMatrix& chi) {
    const auto& basis = chi_operator_basis();
    CMat s = CMat::Zero(4, 4);
    for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n)
            s += chi.mat(m, n) * basis[n].adjoint() * basis[m];
    return max_abs(s - id4());
}

double process_fidelity(const ChiMatrix& chi_t, const ChiMatrix& chi_e) {
    if (chi_t.basis != chi_e.basis)
        throw std::invalid_argument("process_fidelity: basis tags differ");
    const Complex tr = (chi_t.mat * chi_e.mat).trace();
    if (std::abs(std::imag(tr)) > 1e-6)
        throw numerical_error("process_fidelity: imaginary residual above tolerance");
    return std::real(tr);
}

double extract_t2(const ChiMatrix& chi, double g_rad_ns) {
    const double el = std::real(chi.mat(kIZ, kIZ));
    if (el < 1e-4)
        throw extraction_error("extract_t2: chi[IZ,IZ] below threshold, extraction undefined");
    return (3.0 * kPi + 2.0) / (16.0 * g_rad_ns * el);
}

double extract_kappa(const ChiMatrix& chi) {
    const double el = std::real(chi.mat(kIZ, kIZ));
    if (el < 1e-4)
        throw extraction_error("extract_kappa: chi[IZ,IZ] below threshold, extraction undefined");
    return std::real(chi.mat(kIZ, kZI)) / el - (kPi - 2.0) / (3.0 * kPi + 2.0);
}

double state_fidelity(const CMat& rho, const CMat& pure_target) {
    return std::real((rho * pure_target).trace());
}

// ---------------------------------------------------------------------------
// Experiment pipeline
// ---------------------------------------------------------------------------

GateKind gate_from_name(const std::string& name) {
    if (name == "none") return GateKind::None;
    if (name == "sqisw") return GateKind::SQiSW;
    if (name == "iswap") return GateKind::ISwap;
    if (name == "cnot") return GateKind::Cnot;
    throw config_error("unknown gate: " + name);
}

std::string gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::None: return "none";
        case GateKind::SQiSW: return "sqisw";
        case GateKind::ISwap: return "iswap";
        default: return "cnot";
    }
}

CMat ideal_gate_unitary(GateKind kind) {
    switch (kind) {
        case GateKind::None: return id4();
        case GateKind::SQiSW: return sqisw_gate();
        case GateKind::ISwap: return iswap_gate();
        default: return cnot_from_sqisw();
    }
}

namespace {

// One gate step: either a group of simultaneous single-qubit pulses (the
// decoherence window is sized by the longest pulse in the group) or a
// coupled evolution segment at a fixed detuning.
struct GateStep {
    bool is_pulse = false;
    CMat unitary;        // pulses
    double max_angle = 0; // rad, sizes the pulse window
    double delta = 0.0;  // segments
    double duration = 0.0;
};

std::vector<GateStep> make_gate_plan(GateKind kind, const DeviceParams& params) {
    std::vector<GateStep> plan;
    auto pulse = [](const CMat& u, double angle) {
        GateStep s;
        s.is_pulse = true;
        s.unitary = u;
        s.max_angle = angle;
        return s;
    };
    auto segment = [](double delta, double t) {
        GateStep s;
        s.delta = delta;
        s.duration = t;
        return s;
    };
    const double t_half_swap = (kPi / 2.0) / params.g;
    switch (kind) {
        case GateKind::None:
            break;
        case GateKind::SQiSW:
            plan.push_back(segment(0.0, t_half_swap));
            break;
        case GateKind::ISwap:
            plan.push_back(segment(0.0, 2.0 * t_half_swap));
            break;
        case GateKind::Cnot:
            plan.push_back(pulse(rotation(Qubit::A, Axis::Y, kPi / 2), kPi / 2));
            plan.push_back(segment(0.0, t_half_swap));
            plan.push_back(pulse(rotation(Qubit::A, Axis::X, kPi), kPi));
            plan.push_back(segment(0.0, t_half_swap));
            plan.push_back(pulse(CMat(rotation(Qubit::A, Axis::X, kPi / 2) *
                                      rotation(Qubit::B, Axis::X, -kPi / 2)),
                                 kPi / 2));
            plan.push_back(pulse(rotation(Qubit::A, Axis::Y, -kPi / 2), kPi / 2));
            break;
    }
    return plan;
}

struct PipelineContext {
    DeviceParams params;
    ExperimentOptions opt;
    std::vector<CMat> collapse;
    std::vector<GateStep> gate_plan;
    std::vector<Propagator> gate_propagators; // segments only, by plan index
    std::map<double, Propagator> windows;     // decoherence-only, by duration

    PipelineContext(GateKind kind, const DeviceParams& p, const ExperimentOptions& o)
        : params(p), opt(o) {
        params.validate();
        if (opt.noise) collapse = collapse_ops(*opt.noise);
        if (opt.readout) opt.readout->validate();
        gate_plan = make_gate_plan(kind, params);

        gate_propagators.resize(gate_plan.size());
        for (std::size_t i = 0; i < gate_plan.size(); ++i) {
            if (gate_plan[i].is_pulse) continue;
            DeviceParams seg = params;
            seg.delta = gate_plan[i].delta;
            gate_propagators[i] =
                make_propagator(hamiltonian(seg), collapse, gate_plan[i].duration);
        }
        if (opt.pulse_pi_ns > 0.0 && !collapse.empty()) {
            // Half-windows for pi and pi/2 pulses cover every plan.
            add_window(opt.pulse_pi_ns / 2.0);
            add_window(opt.pulse_pi_ns / 4.0);
        }
    }

    void add_window(double dur) {
        if (dur <= 0.0) return;
        if (!windows.count(dur))
            windows.emplace(dur, make_propagator(CMat::Zero(4, 4), collapse, dur));
    }

    CMat decohere(CMat rho, double dur) const {
        if (dur <= 0.0 || collapse.empty()) return rho;
        return windows.at(dur).apply(rho);
    }

    CMat apply_pulse_group(CMat rho, const CMat& u, double max_angle) const {
        const double w = opt.pulse_pi_ns * max_angle / kPi;
        rho = decohere(std::move(rho), w / 2.0);
        rho = u * rho * u.adjoint();
        return decohere(std::move(rho), w / 2.0);
    }

    CMat simulate_output(const InputState& in) const {
        CMat rho = CMat::Zero(4, 4);
        rho(0, 0) = 1.0;
        rho = apply_pulse_group(std::move(rho), prep_unitary(in),
                                std::max(prep_angle(in.a), prep_angle(in.b)));
        for (std::size_t i = 0; i < gate_plan.size(); ++i) {
            if (gate_plan[i].is_pulse)
                rho = apply_pulse_group(std::move(rho), gate_plan[i].unitary,
                                        gate_plan[i].max_angle);
            else if (!collapse.empty() || gate_plan[i].duration > 0.0)
                rho = gate_propagators[i].apply(rho);
        }
        return rho;
    }

    std::array<ProbVector, 9> measure(const CMat& rho_out, std::size_t input_index,
                                      std::vector<ShotRecord>* records,
                                      bool* negative_flagged) const {
        std::array<ProbVector, 9> out;
        const auto& settings = qst_settings();
        for (std::size_t s = 0; s < 9; ++s) {
            const double max_angle =
                std::max(pre_rotation_angle(settings[s].a), pre_rotation_angle(settings[s].b));
            const CMat rotated =
                apply_pulse_group(rho_out, setting_unitary(settings[s]), max_angle);
            ProbVector p{std::real(rotated(0, 0)), std::real(rotated(1, 1)),
                         std::real(rotated(2, 2)), std::real(rotated(3, 3)), false};
            if (opt.readout) p = apply_model(*opt.readout, p);
            if (opt.shots > 0) {
                ShotRecord rec = sample(p, opt.shots,
                                        derive_seed(opt.seed, input_index * 9 + s),
                                        settings[s].label());
                p = rec.frequencies();
                if (records) records->push_back(std::move(rec));
            }
            if (opt.readout && opt.calibrate) p = invert_model(*opt.readout, p);
            if (p.negative_flagged && negative_flagged) *negative_flagged = true;
            out[s] = p;
        }
        return out;
    }
};

std::size_t input_index_of(const InputState& in) {
    const auto& inputs = qpt_inputs();
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (inputs[i].a == in.a && inputs[i].b == in.b) return i;
    return 0;
}

} // namespace

StateTomographyRun run_state_tomography(GateKind gate, const InputState& input,
                                        const DeviceParams& params,
                                        const ExperimentOptions& opts) {
    const PipelineContext ctx(gate, params, opts);
    StateTomographyRun run;
    const CMat rho_out = ctx.simulate_output(input);
    const auto outcomes =
        ctx.measure(rho_out, input_index_of(input),
                    opts.keep_records ? &run.records : nullptr, &run.negative_flagged);
    run.rho = qst_reconstruct(outcomes);
    run.min_eigenvalue = eigh(run.rho, 1e-9).values.minCoeff();
    if (opts.project) run.rho = project_physical(run.rho);
    return run;
}

ProcessTomographyRun run_process_tomography(GateKind gate, const DeviceParams& params,
                                            const ExperimentOptions& opts) {
    const PipelineContext ctx(gate, params, opts);
    const auto& inputs = qpt_inputs();

    std::vector<CMat> outputs(16);
    std::vector<std::vector<ShotRecord>> records(16);
    std::vector<char> negative(16, 0);

    parallel_for(16, opts.jobs, [&](std::size_t k) {
        const CMat rho_out = ctx.simulate_output(inputs[k]);
        bool neg = false;
        const auto outcomes = ctx.measure(rho_out, k,
                                          opts.keep_records ? &records[k] : nullptr, &neg);
        CMat rho = qst_reconstruct(outcomes);
        if (opts.project) rho = project_physical(rho);
        outputs[k] = std::move(rho);
        negative[k] = neg ? 1 : 0;
    });

    std::vector<std::pair<CMat, CMat>> pairs;
    pairs.reserve(16);
    for (std::size_t k = 0; k < 16; ++k)
        pairs.emplace_back(input_density(inputs[k]), outputs[k]);

    QptReconstruction rec = qpt_reconstruct(pairs);

    ProcessTomographyRun run;
    run.chi = std::move(rec.chi);
    run.residual = rec.residual;
    run.tp_residual = trace_preservation_residual(run.chi);
    for (std::size_t k = 0; k < 16; ++k) {
        if (negative[k]) run.negative_flagged = true;
        for (auto& r : records[k]) run.records.push_back(std::move(r));
    }
    return run;
}

ChiMatrix channel_chi(GateKind gate, const DeviceParams& params,
                      const std::optional<NoiseModel>& noise, double pulse_pi_ns) {
    ExperimentOptions opt;
    opt.noise = noise;
    opt.pulse_pi_ns = pulse_pi_ns;
    const PipelineContext ctx(gate, params, opt);

    std::vector<std::pair<CMat, CMat>> pairs;
    pairs.reserve(16);
    for (const InputState& in : qpt_inputs())
        pairs.emplace_back(input_density(in), ctx.simulate_output(in));
    return qpt_reconstruct(pairs).chi;
}

std::vector<FlaggedElement> flag_chi_elements(const ChiMatrix& chi, double g_rad_ns,
                                              double threshold) {
    if (chi.basis != kChiBasis)
        throw std::invalid_argument("flag_chi_elements: unexpected basis tag");

    DeviceParams params;
    params.g = g_rad_ns;
    params.delta = 0.0;

    const ChiMatrix base = chi_theory(sqisw_gate());

    // Finite-difference probes: a pure-relaxation model (T2 = 2 T1) and a
    // pure-dephasing model (T1 effectively infinite).
    const double eps = 1e-5; // rate perturbation, 1/ns
    NoiseModel relax{1.0 / eps, 1.0 / eps, 2.0 / eps, 2.0 / eps, 0.0};
    NoiseModel dephase{1e12, 1e12, 1.0 / eps, 1.0 / eps, 0.0};

    const CMat d_relax = (channel_chi(GateKind::SQiSW, params, relax).mat - base.mat) / eps;
    const CMat d_dephase = (channel_chi(GateKind::SQiSW, params, dephase).mat - base.mat) / eps;

    const auto& labels = chi_element_labels();
    std::vector<FlaggedElement> out;
    for (int m = 0; m < 16; ++m) {
        for (int n = 0; n < 16; ++n) {
            const Complex v = chi.mat(m, n);
            if (std::abs(v) <= threshold) continue;
            FlaggedElement f;
            f.m = m;
            f.n = n;
            f.row = labels[m];
            f.col = labels[n];
            f.re = std::real(v);
            f.im = std::imag(v);
            f.magnitude = std::abs(v);
            const double sr = std::abs(d_relax(m, n));
            const double sd = std::abs(d_dephase(m, n));
            if (std::abs(base.mat(m, n)) > 1e-6)
                f.classification = "ideal";
            else if (sr < 1e-3 && sd < 1e-3)
                f.classification = "mixed";
            else if (sr >= 3.0 * sd)
                f.classification = "relaxation";
            else if (sd >= 3.0 * sr)
                f.classification = "dephasing";
            else
                f.classification = "mixed";
            out.push_back(std::move(f));
        }
    }
    std::sort(out.begin(), out.end(), [](const FlaggedElement& x, const FlaggedElement& y) {
        if (x.magnitude != y.magnitude) return x.magnitude > y.magnitude;
        return std::pair(x.m, x.n) < std::pair(y.m, y.n);
    });
    return out;
}

} // namespace sqisw
