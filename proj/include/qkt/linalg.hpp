#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace qkt {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline const cxd im{0.0, 1.0};

/// primitive third root of unity, e^{2*pi*i/3}
inline const cxd omega3{-0.5, 0.8660254037844386467637231707529362};

inline Mat dag(const Mat& m) { return m.adjoint(); }

Mat kron(const Mat& a, const Mat& b);

inline bool is_unitary(const Mat& u, double tol = 1e-12) {
    return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_hermitian(const Mat& h, double tol = 1e-12) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// max-norm distance min_phi || a - e^{i phi} b ||_inf, phase from tr(b^dag a)
double phase_aligned_dist(const Mat& a, const Mat& b);

/// |tr(b^dag a)|^2 / dim^2, the process-overlap fidelity of two unitaries
inline double unitary_fidelity(const Mat& a, const Mat& b) {
    const double d = static_cast<double>(a.rows());
    return std::norm((b.adjoint() * a).trace()) / (d * d);
}

/// wrap an angle into (-pi, pi]
double wrap_angle(double a);

/// positive modulo
inline int imod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace qkt
