#pragma once

#include <complex>

#include <Eigen/Dense>

#include "sqisw/errors.hpp"

namespace sqisw {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Frequencies are quoted as f = omega/2pi in MHz at every public boundary;
// internally everything is angular (rad/ns) with times in ns.
inline double mhz_to_rad_ns(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
inline double rad_ns_to_mhz(double w) { return w / kTwoPi * 1e3; }

const CMat& id2();
const CMat& id4();
const CMat& pauli_x();
const CMat& pauli_y();
const CMat& pauli_z();
const CMat& sigma_minus(); // |0><1|

// Checked matrix product for equal square dimensions.
CMat matmul(const CMat& a, const CMat& b);

// Kronecker product, block (i,j) = a(i,j) * b.
CMat kron(const CMat& a, const CMat& b);

CMat dagger(const CMat& a);
Complex trace(const CMat& a);

double max_abs(const CMat& a);
bool is_hermitian(const CMat& a, double tol = 1e-10);

// Matrix exponential by scaling-and-squaring: the argument is halved until
// its 1-norm is <= 0.5, the Taylor series is summed until the term's 1-norm
// drops below 1e-18, then the result is squared back up.
CMat expm(const CMat& a);

struct EighResult {
    Eigen::VectorXd values; // ascending
    CMat vectors;           // orthonormal columns
};

// Hermitian eigendecomposition. Throws std::invalid_argument if the input is
// not Hermitian within hermitian_tol.
EighResult eigh(const CMat& a, double hermitian_tol = 1e-10);

// Least squares via normal equations with a Hermitian (LDLT) solve. No
// regularization: a rank-deficient system throws numerical_error.
CVec lstsq(const CMat& a, const CVec& b);
Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

} // namespace sqisw
