#include "sqisw/measurement.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sqisw {

double ProbVector::operator[](int i) const {
    switch (i) {
        case 0: return p00;
        case 1: return p01;
        case 2: return p10;
        case 3: return p11;
        default: throw std::out_of_range("ProbVector index");
    }
}

ProbVector ProbVector::from_vec(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3], false};
}

bool ProbVector::physical(double tol) const {
    if (std::abs(sum() - 1.0) > tol) return false;
    for (int i = 0; i < 4; ++i)
        if ((*this)[i] < -tol) return false;
    return true;
}

void ProbVector::require_physical(const char* what) const {
    if (!physical()) throw std::invalid_argument(std::string(what) + ": unphysical probability vector");
}

void MeasurementModel::validate() const {
    const double vals[] = {f0a, f1a, f0b, f1b, xab, xba};
    for (double v : vals)
        if (!(v >= 0.0 && v <= 1.0))
            throw config_error("MeasurementModel: probabilities must lie in [0, 1]");
}

ProbVector ShotRecord::frequencies() const {
    if (shots == 0) throw std::invalid_argument("ShotRecord: zero shots");
    const double n = static_cast<double>(shots);
    return {n00 / n, n01 / n, n10 / n, n11 / n, false};
}

Eigen::Matrix4d fidelity_matrix(const MeasurementModel& m) {
    m.validate();
    Eigen::Matrix2d fa, fb;
    fa << m.f0a, 1.0 - m.f1a, 1.0 - m.f0a, m.f1a;
    fb << m.f0b, 1.0 - m.f1b, 1.0 - m.f0b, m.f1b;
    Eigen::Matrix4d f;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            f.block<2, 2>(2 * i, 2 * j) = fa(i, j) * fb;
    return f;
}

Eigen::Matrix4d crosstalk_matrix(const MeasurementModel& m) {
    m.validate();
    Eigen::Matrix4d x = Eigen::Matrix4d::Identity();
    x(1, 1) = 1.0 - m.xba;
    x(2, 2) = 1.0 - m.xab;
    x(3, 1) = m.xba;
    x(3, 2) = m.xab;
    return x;
}

ProbVector apply_model(const MeasurementModel& m, const ProbVector& p_intrinsic) {
    p_intrinsic.require_physical("apply_model");
    const Eigen::Vector4d out =
        crosstalk_matrix(m) * (fidelity_matrix(m) * p_intrinsic.vec());
    return ProbVector::from_vec(out);
}

ProbVector invert_model(const MeasurementModel& m, const ProbVector& p_measured) {
    const Eigen::Matrix4d f = fidelity_matrix(m);
    const Eigen::Matrix4d x = crosstalk_matrix(m);
    // det F = (f0a + f1a - 1)(f0b + f1b - 1), det X = (1 - xba)(1 - xab)
    if (std::abs(f.determinant()) < 1e-12 || std::abs(x.determinant()) < 1e-12)
        throw numerical_error("invert_model: singular correction matrix");

    const Eigen::Vector4d out = f.inverse() * (x.inverse() * p_measured.vec());
    ProbVector p = ProbVector::from_vec(out);
    for (int i = 0; i < 4; ++i)
        if (p[i] < -1e-12) p.negative_flagged = true;
    return p;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 on master advanced by the cell index
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

ShotRecord sample(const ProbVector& p, std::uint64_t shots, std::uint64_t seed,
                  std::string setting) {
    p.require_physical("sample");
    if (shots == 0) throw std::invalid_argument("sample: shots must be positive");

    double c[4];
    double acc = 0.0;
    const double total = p.sum();
    for (int i = 0; i < 4; ++i) {
        acc += std::max(p[i], 0.0) / total;
        c[i] = acc;
    }
    c[3] = 1.0;

    std::mt19937_64 gen(seed);
    std::uint64_t counts[4] = {0, 0, 0, 0};
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        int k = 0;
        while (k < 3 && u >= c[k]) ++k;
        ++counts[k];
    }
    return {counts[0], counts[1], counts[2], counts[3], shots, std::move(setting)};
}

std::pair<double, double> trace_out(const ProbVector& p) {
    return {p.p10 + p.p11, p.p01 + p.p11};
}

FidelityPair estimate_fidelities(const SingleQubitProbe& probe, Qubit q,
                                 std::optional<double> meas_delay_ns,
                                 std::optional<double> t1_ns) {
    FidelityPair out;
    out.f0 = 1.0 - probe(q, false);
    double p1 = probe(q, true);
    if (meas_delay_ns && t1_ns) p1 /= std::exp(-*meas_delay_ns / *t1_ns);
    out.f1 = p1;
    return out;
}

double estimate_crosstalk_ratio(const ProbVector& ground_run, const ProbVector& excited_run,
                                Qubit excited, double f0_other,
                                std::optional<double> x_reverse) {
    if (!(f0_other > 0.0))
        throw std::invalid_argument("estimate_crosstalk_ratio: f0 must be positive");

    const auto [g1a, g1b] = trace_out(ground_run);
    const auto [e1a, e1b] = trace_out(excited_run);

    // Exciting B moves P1B (denominator) and leaks into P1A (numerator);
    // symmetric when A is the excited qubit.
    const double num = (excited == Qubit::B) ? (e1a - g1a) : (e1b - g1b);
    const double den = (excited == Qubit::B) ? (e1b - g1b) : (e1a - g1a);
    if (std::abs(den) < 0.1)
        throw numerical_error("estimate_crosstalk_ratio: excited run barely changes the "
                              "marginal; estimate unreliable");

    const double ratio = num / den;
    if (x_reverse) return ratio * (1.0 - (1.0 - f0_other) * (*x_reverse)) / f0_other;
    return ratio / f0_other;
}

double crosstalk_consistency_solve(const ProbVector& p00_run, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("crosstalk_consistency_solve: k must be > 0");
    const double P00 = p00_run.p00, P01 = p00_run.p01, P10 = p00_run.p10;
    if (!(P00 > 0.0))
        throw numerical_error("crosstalk_consistency_solve: P00 must be positive");
    if (std::abs(P00 - 1.0) < 1e-12) return 0.0; // error-free readout

    const double rad = std::pow((1.0 - P00 - P01) - k * (1.0 - P00 - P10), 2) +
                       4.0 * k * P10 * P01 / P00;
    if (rad < 0.0)
        throw numerical_error("crosstalk_consistency_solve: negative discriminant, no solution");

    return (P00 + k * P00 - k + k * P10 + P01 - 1.0 + std::sqrt(rad)) /
           (2.0 * k * (P00 - 1.0));
}

} // namespace sqisw
