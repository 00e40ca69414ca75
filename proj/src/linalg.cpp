#include "sqisw/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace sqisw {

namespace {

CMat make2(Complex a, Complex b, Complex c, Complex d) {
    CMat m(2, 2);
    m << a, b, c, d;
    return m;
}

double norm1(const CMat& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

} // namespace

const CMat& id2() {
    static const CMat m = CMat::Identity(2, 2);
    return m;
}

const CMat& id4() {
    static const CMat m = CMat::Identity(4, 4);
    return m;
}

const CMat& pauli_x() {
    static const CMat m = make2(0, 1, 1, 0);
    return m;
}

const CMat& pauli_y() {
    static const CMat m = make2(0, Complex(0, -1), Complex(0, 1), 0);
    return m;
}

const CMat& pauli_z() {
    static const CMat m = make2(1, 0, 0, -1);
    return m;
}

const CMat& sigma_minus() {
    static const CMat m = make2(0, 1, 0, 0);
    return m;
}

CMat matmul(const CMat& a, const CMat& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument("matmul: dimension mismatch");
    return a * b;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMat dagger(const CMat& a) { return a.adjoint(); }

Complex trace(const CMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("trace: square matrix required");
    return a.trace();
}

double max_abs(const CMat& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - CMat(a.adjoint())) < tol;
}

CMat expm(const CMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: square matrix required");
    if (!a.allFinite()) throw std::invalid_argument("expm: non-finite entries");
    const Eigen::Index n = a.rows();

    int squarings = 0;
    const double na = norm1(a);
    if (na > 0.5) squarings = static_cast<int>(std::ceil(std::log2(na / 0.5)));

    const CMat x = a / std::ldexp(1.0, squarings);
    CMat term = CMat::Identity(n, n);
    CMat sum = CMat::Identity(n, n);
    for (int k = 1; k <= 64; ++k) {
        term = CMat(term * x) / static_cast<double>(k);
        sum += term;
        if (norm1(term) < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) sum = CMat(sum * sum);
    return sum;
}

EighResult eigh(const CMat& a, double hermitian_tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigh: square matrix required");
    if (!is_hermitian(a, hermitian_tol))
        throw std::invalid_argument("eigh: matrix is not Hermitian within tolerance");

    Eigen::SelfAdjointEigenSolver<CMat> solver(a);
    if (solver.info() != Eigen::Success)
        throw numerical_error("eigh: eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

template <typename Mat, typename Vec>
Vec lstsq_impl(const Mat& a, const Vec& b) {
    if (a.rows() < a.cols())
        throw std::invalid_argument("lstsq: need rows >= cols");
    if (a.rows() != b.rows())
        throw std::invalid_argument("lstsq: rhs size mismatch");

    const Mat normal = a.adjoint() * a;
    const Vec rhs = a.adjoint() * b;

    Eigen::LDLT<Mat> ldlt(normal);
    if (ldlt.info() != Eigen::Success)
        throw numerical_error("lstsq: factorization failed");

    const Eigen::VectorXd d = ldlt.vectorD().real();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (dmax <= 0.0 || dmin < 1e-12 * dmax)
        throw numerical_error("lstsq: rank-deficient system");

    return ldlt.solve(rhs);
}

} // namespace

CVec lstsq(const CMat& a, const CVec& b) { return lstsq_impl<CMat, CVec>(a, b); }

Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    return lstsq_impl<Eigen::MatrixXd, Eigen::VectorXd>(a, b);
}

} // namespace sqisw
