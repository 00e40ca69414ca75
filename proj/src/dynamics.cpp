#include "sqisw/dynamics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "sqisw/parallel.hpp"

namespace sqisw {

DeviceParams DeviceParams::from_mhz(double g_mhz, double delta_mhz) {
    DeviceParams p;
    p.g = mhz_to_rad_ns(g_mhz);
    p.delta = mhz_to_rad_ns(delta_mhz);
    p.validate();
    return p;
}

void DeviceParams::validate() const {
    if (!(g >= 0.0)) throw config_error("DeviceParams: coupling g must be >= 0");
    if (!(std::abs(delta) < mhz_to_rad_ns(1000.0)))
        throw config_error("DeviceParams: |detuning| must stay below 1 GHz");
}

void NoiseModel::validate() const {
    const double times[] = {t1a, t1b, t2a, t2b};
    for (double t : times)
        if (!(t > 0.0)) throw config_error("NoiseModel: relaxation times must be positive");
    if (t2a > 2.0 * t1a || t2b > 2.0 * t1b)
        throw config_error("NoiseModel: T2 must not exceed 2*T1");
    if (!(corr >= 0.0 && corr <= 1.0))
        throw config_error("NoiseModel: corr must lie in [0, 1]");
}

PulseEvent PulseEvent::rot(Qubit q, Axis axis, double angle) {
    PulseEvent e;
    e.kind = axis == Axis::X ? Kind::RotX : (axis == Axis::Y ? Kind::RotY : Kind::RotZ);
    e.qubit = q;
    e.angle = angle;
    return e;
}

PulseEvent PulseEvent::detune(double delta_rad_ns, double duration_ns) {
    PulseEvent e;
    e.kind = Kind::Detune;
    e.delta = delta_rad_ns;
    e.duration = duration_ns;
    return e;
}

PulseEvent PulseEvent::idle(double delta_rad_ns, double duration_ns) {
    PulseEvent e = detune(delta_rad_ns, duration_ns);
    e.kind = Kind::Idle;
    return e;
}

double coupling_from_capacitance(double cc_farad, double c_farad, double omega10_rad_s) {
    if (!(cc_farad > 0.0) || !(c_farad > 0.0))
        throw config_error("coupling_from_capacitance: capacitances must be positive");
    if (!(cc_farad < c_farad))
        throw config_error("coupling_from_capacitance: coupling capacitance must be "
                           "smaller than the qubit capacitance");
    return (cc_farad / c_farad) * omega10_rad_s;
}

CMat hamiltonian(const DeviceParams& params) {
    params.validate();
    return (params.g / 4.0) * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y())) -
           (params.delta / 2.0) * kron(id2(), pauli_z());
}

CMat ideal_unitary(const DeviceParams& params, double t_ns) {
    if (t_ns < 0.0) throw std::invalid_argument("ideal_unitary: negative time");
    return expm(Complex(0, -1) * hamiltonian(params) * t_ns);
}

namespace {

CMat swap_block_unitary(double gt) {
    const double c = std::cos(gt / 2.0);
    const Complex is(0.0, std::sin(gt / 2.0));
    CMat u = CMat::Identity(4, 4);
    u(1, 1) = c;
    u(2, 2) = c;
    u(1, 2) = -is;
    u(2, 1) = -is;
    return u;
}

} // namespace

CMat sqisw_gate() { return swap_block_unitary(kPi / 2.0); }
CMat iswap_gate() { return swap_block_unitary(kPi); }

Eigen::Matrix2cd rotation_1q(Axis axis, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("rotation: non-finite angle");
    const CMat& s = axis == Axis::X ? pauli_x() : (axis == Axis::Y ? pauli_y() : pauli_z());
    const CMat r = std::cos(angle / 2.0) * id2() -
                   Complex(0, 1) * std::sin(angle / 2.0) * s;
    return Eigen::Matrix2cd(r);
}

CMat rotation(Qubit q, Axis axis, double angle) {
    const CMat r = rotation_1q(axis, angle);
    return q == Qubit::A ? kron(r, id2()) : kron(id2(), r);
}

CMat cnot_from_sqisw() {
    const CMat sq = sqisw_gate();
    return rotation(Qubit::A, Axis::Y, -kPi / 2) * rotation(Qubit::A, Axis::X, kPi / 2) *
           rotation(Qubit::B, Axis::X, -kPi / 2) * sq * rotation(Qubit::A, Axis::X, kPi) *
           sq * rotation(Qubit::A, Axis::Y, kPi / 2);
}

std::vector<CMat> collapse_ops(const NoiseModel& noise) {
    noise.validate();
    std::vector<CMat> ops;
    ops.push_back(std::sqrt(1.0 / noise.t1a) * kron(sigma_minus(), id2()));
    ops.push_back(std::sqrt(1.0 / noise.t1b) * kron(id2(), sigma_minus()));
    ops.push_back(std::sqrt((1.0 - noise.corr) / (2.0 * noise.tphi_a())) * kron(pauli_z(), id2()));
    ops.push_back(std::sqrt((1.0 - noise.corr) / (2.0 * noise.tphi_b())) * kron(id2(), pauli_z()));
    if (noise.corr > 0.0) {
        const double tphi_bar = 2.0 / (1.0 / noise.tphi_a() + 1.0 / noise.tphi_b());
        ops.push_back(std::sqrt(noise.corr / (2.0 * tphi_bar)) *
                      (kron(pauli_z(), id2()) + kron(id2(), pauli_z())) / std::sqrt(2.0));
    }
    return ops;
}

CMat liouvillian(const CMat& h, const std::vector<CMat>& ls) {
    const Eigen::Index d = h.rows();
    const CMat idd = CMat::Identity(d, d);
    CMat l = Complex(0, -1) * (kron(idd, h) - kron(h.transpose(), idd));
    for (const CMat& c : ls) {
        const CMat cdc = c.adjoint() * c;
        l += kron(c.conjugate(), c) - 0.5 * kron(idd, cdc) - 0.5 * kron(cdc.transpose(), idd);
    }
    return l;
}

CMat Propagator::apply(const CMat& rho) const {
    if (unitary) return op * rho * op.adjoint();
    const CVec v = Eigen::Map<const CVec>(rho.data(), rho.size());
    const CVec w = op * v;
    return Eigen::Map<const CMat>(w.data(), rho.rows(), rho.cols());
}

Propagator make_propagator(const CMat& h, const std::vector<CMat>& ls, double t_ns) {
    if (t_ns < 0.0) throw std::invalid_argument("make_propagator: negative time");
    Propagator p;
    if (ls.empty()) {
        p.unitary = true;
        p.op = expm(Complex(0, -1) * h * t_ns);
    } else {
        p.unitary = false;
        p.op = expm(liouvillian(h, ls) * t_ns);
    }
    return p;
}

CMat lindblad_evolve(const CMat& rho, const DeviceParams& params,
                     const std::optional<NoiseModel>& noise, double t_ns) {
    const std::vector<CMat> ls = noise ? collapse_ops(*noise) : std::vector<CMat>{};
    return make_propagator(hamiltonian(params), ls, t_ns).apply(rho);
}

CMat run_sequence(const PulseSequence& seq, const DeviceParams& params,
                  const std::optional<NoiseModel>& noise, const EvolveOptions& opts) {
    params.validate();
    const std::vector<CMat> ls = noise ? collapse_ops(*noise) : std::vector<CMat>{};

    CMat rho = CMat::Zero(4, 4);
    rho(0, 0) = 1.0;

    std::map<double, Propagator> window_cache;
    auto decohere = [&](CMat r, double dur) {
        if (dur <= 0.0 || ls.empty()) return r;
        auto it = window_cache.find(dur);
        if (it == window_cache.end())
            it = window_cache.emplace(dur, make_propagator(CMat::Zero(4, 4), ls, dur)).first;
        return it->second.apply(r);
    };

    for (const PulseEvent& e : seq.events) {
        switch (e.kind) {
            case PulseEvent::Kind::RotX:
            case PulseEvent::Kind::RotY:
            case PulseEvent::Kind::RotZ: {
                const Axis axis = e.kind == PulseEvent::Kind::RotX
                                      ? Axis::X
                                      : (e.kind == PulseEvent::Kind::RotY ? Axis::Y : Axis::Z);
                const double w = opts.pulse_pi_ns * std::abs(e.angle) / kPi;
                const CMat u = rotation(e.qubit, axis, e.angle);
                rho = decohere(rho, w / 2.0);
                rho = u * rho * u.adjoint();
                rho = decohere(rho, w / 2.0);
                break;
            }
            case PulseEvent::Kind::Detune:
            case PulseEvent::Kind::Idle: {
                if (e.duration < 0.0)
                    throw std::invalid_argument("run_sequence: negative segment duration");
                DeviceParams seg = params;
                seg.delta = e.delta;
                rho = make_propagator(hamiltonian(seg), ls, e.duration).apply(rho);
                break;
            }
        }
    }
    return rho;
}

std::vector<SwapScanPoint> swap_scan(const DeviceParams& params,
                                     const std::optional<NoiseModel>& noise,
                                     const std::vector<double>& tf_ns,
                                     const std::vector<double>& delta_rad_ns,
                                     const SwapScanOptions& opts) {
    if (tf_ns.empty() || delta_rad_ns.empty())
        throw config_error("swap_scan: empty grid");
    params.validate();
    if (opts.readout) opts.readout->validate();

    const std::size_t n = tf_ns.size() * delta_rad_ns.size();
    std::vector<SwapScanPoint> out(n);

    parallel_for(n, opts.jobs, [&](std::size_t idx) {
        const std::size_t di = idx / tf_ns.size();
        const std::size_t ti = idx % tf_ns.size();
        const double delta = delta_rad_ns[di];
        const double tf = tf_ns[ti];

        PulseSequence seq;
        seq.events.push_back(PulseEvent::rot(Qubit::A, Axis::X, kPi));
        seq.events.push_back(PulseEvent::detune(delta, tf));
        const CMat rho = run_sequence(seq, params, noise, opts.evolve);

        ProbVector p{std::real(rho(0, 0)), std::real(rho(1, 1)),
                     std::real(rho(2, 2)), std::real(rho(3, 3)), false};
        if (opts.shots > 0) {
            if (opts.readout) p = apply_model(*opts.readout, p);
            p = sample(p, opts.shots, derive_seed(opts.seed, idx)).frequencies();
        }
        out[idx] = {delta, tf, p};
    });
    return out;
}

} // namespace sqisw
