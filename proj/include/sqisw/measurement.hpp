#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "sqisw/errors.hpp"

namespace sqisw {

enum class Qubit { A, B };

// Two-qubit outcome probabilities, ordered (p00, p01, p10, p11).
// Calibration-corrected vectors may carry small negative entries; they are
// flagged rather than clamped so downstream reconstruction stays unbiased.
struct ProbVector {
    double p00 = 0.0;
    double p01 = 0.0;
    double p10 = 0.0;
    double p11 = 0.0;
    bool negative_flagged = false;

    double operator[](int i) const;
    double sum() const { return p00 + p01 + p10 + p11; }
    Eigen::Vector4d vec() const { return {p00, p01, p10, p11}; }
    static ProbVector from_vec(const Eigen::Vector4d& v);

    bool physical(double tol = 1e-9) const;
    void require_physical(const char* what) const;
};

// Readout model: identification fidelities f0/f1 per qubit and crosstalk
// excitation probabilities x_ab (A's |1> exciting B) and x_ba.
struct MeasurementModel {
    double f0a = 1.0;
    double f1a = 1.0;
    double f0b = 1.0;
    double f1b = 1.0;
    double xab = 0.0;
    double xba = 0.0;

    void validate() const;
};

struct ShotRecord {
    std::uint64_t n00 = 0;
    std::uint64_t n01 = 0;
    std::uint64_t n10 = 0;
    std::uint64_t n11 = 0;
    std::uint64_t shots = 0;
    std::string setting;

    ProbVector frequencies() const;
};

// F = F_A (x) F_B with single-qubit blocks [[f0, 1-f1], [1-f0, f1]].
Eigen::Matrix4d fidelity_matrix(const MeasurementModel& m);

// X = diag(1, 1-x_ba, 1-x_ab, 1) with x_ba at (11,01) and x_ab at (11,10).
Eigen::Matrix4d crosstalk_matrix(const MeasurementModel& m);

// Measured probabilities p_m = X F p_i (fidelity errors feed crosstalk).
ProbVector apply_model(const MeasurementModel& m, const ProbVector& p_intrinsic);

// Inverse map p_i = F^-1 X^-1 p_m. Throws numerical_error when the
// correction matrices are singular.
ProbVector invert_model(const MeasurementModel& m, const ProbVector& p_measured);

// Deterministic per-cell seed stream for parallel sweeps.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Multinomial draw, deterministic given seed.
ShotRecord sample(const ProbVector& p, std::uint64_t shots, std::uint64_t seed,
                  std::string setting = {});

// Marginals P1A = p10+p11, P1B = p01+p11.
std::pair<double, double> trace_out(const ProbVector& p);

struct FidelityPair {
    double f0 = 1.0;
    double f1 = 1.0;
};

// Single-qubit experiment interface: returns P(measure 1) for the given
// qubit, prepared in |0> (pi_pulse=false) or pi-pulsed to |1>.
using SingleQubitProbe = std::function<double(Qubit, bool)>;

// f0 = 1 - P(1 | prep 0), f1 = P(1 | prep pi). When a measurement delay and
// T1 are supplied, the |1>-state preparation decay exp(-delay/T1) is divided
// out of the f1 estimate.
FidelityPair estimate_fidelities(const SingleQubitProbe& probe, Qubit q,
                                 std::optional<double> meas_delay_ns = std::nullopt,
                                 std::optional<double> t1_ns = std::nullopt);

// Crosstalk from the change in marginals between a ground run and a run with
// `excited` pi-pulsed: the ratio of marginal differences equals
// f0_other * x within the small-correction approximation, so the estimate is
// ratio / f0_other. Supplying x_reverse switches to the exact denominator
// 1 - (1 - f0_other) * x_reverse. Throws numerical_error when the
// denominator difference is below 0.1 (unreliable estimate).
double estimate_crosstalk_ratio(const ProbVector& ground_run, const ProbVector& excited_run,
                                Qubit excited, double f0_other,
                                std::optional<double> x_reverse = std::nullopt);

// Closed-form x_ab from a |00>-state run under an assumed ratio
// k = x_ba/x_ab. The quadratic in x_ab is
//   k P00 (P00-1) x^2 + P00 [(1+k)(1-P00) - k P10 - P01] x + (P01 P10 - P00 P11) = 0
// and the physical root is
//   x_ab = [P00 + k P00 - k + k P10 + P01 - 1
//           + sqrt(((1-P00-P01) - k(1-P00-P10))^2 + 4 k P10 P01 / P00)]
//          / (2 k (P00 - 1)),
// i.e. the + branch of the radical; the - branch is the spurious root > 1.
// Throws numerical_error on a negative discriminant.
double crosstalk_consistency_solve(const ProbVector& p00_run, double k);

} // namespace sqisw
