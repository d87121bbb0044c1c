#include "qkt/decompose.hpp"

#include <array>
#include <stdexcept>

#include "qkt/algebra.hpp"

namespace qkt {

namespace {

constexpr double kDropTol = 1e-13;

struct EulerAngles {
    double a, b, c;
};

/// Solve RZ(a) X90 RZ(b) X90 RZ(c) = B0 for B0 in SU(2).
EulerAngles euler_zxz(const Eigen::Matrix2cd& b0) {
    const cxd x = b0(0, 0), y = b0(1, 0);
    const double b = 2.0 * std::atan2(std::abs(x), std::abs(y));
    const double argx = (std::abs(x) > 1e-16) ? std::arg(x) : 0.0;
    const double argy = (std::abs(y) > 1e-16) ? std::arg(y) : 0.0;
    const double sum = -2.0 * argx - pi;   // a + c
    const double diff = 2.0 * argy + pi;   // a - c
    return EulerAngles{0.5 * (sum + diff), b, 0.5 * (sum - diff)};
}

void push_z(std::vector<Gate>& out, int sub01, int target, double phi) {
    if (std::abs(wrap_angle(phi)) < kDropTol) return;
    out.push_back(sub01 ? Gate::z01(target, wrap_angle(phi)) : Gate::z12(target, wrap_angle(phi)));
}

/// Realize a two-level block factor exactly up to a diagonal that is constant
/// on the subspace; returns the residual diagonal correction C with F = P * C.
Mat realize_block(std::vector<Gate>& out_matrix_order, const Mat& f, bool sub01, int target) {
    const int j = sub01 ? 0 : 1, k = sub01 ? 1 : 2;
    Eigen::Matrix2cd blk;
    blk << f(j, j), f(j, k), f(k, j), f(k, k);
    const cxd det = blk.determinant();
    const double delta = std::arg(det);
    const Eigen::Matrix2cd b0 = std::exp(-im * delta / 2.0) * blk;
    const auto [a, b, c] = euler_zxz(b0);

    std::vector<Gate> seq;  // matrix order: Z(a) X90 Z(b) X90 Z(c)
    push_z(seq, sub01, target, a);
    seq.push_back(Gate::fixed(sub01 ? GateKind::X01Half : GateKind::X12Half, {target}));
    push_z(seq, sub01, target, b);
    seq.push_back(Gate::fixed(sub01 ? GateKind::X01Half : GateKind::X12Half, {target}));
    push_z(seq, sub01, target, c);

    Mat p = Mat::Identity(3, 3);
    for (const auto& g : seq) p = p * g.matrix();
    out_matrix_order.insert(out_matrix_order.end(), seq.begin(), seq.end());
    return p.adjoint() * f;  // diagonal, constant on the subspace
}

bool nearly_diagonal(const Mat& u, double tol) {
    double off = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) off = std::max(off, std::abs(u(i, j)));
    return off <= tol;
}

const std::array<GateKind, 8> kSinglePulses = {
    GateKind::X01Half, GateKind::X12Half, GateKind::Y01Half, GateKind::Y12Half,
    GateKind::X01Pi,   GateKind::X12Pi,   GateKind::Y01Pi,   GateKind::Y12Pi,
};

}  // namespace

Mat gate_list_unitary(const std::vector<Gate>& gates) {
    Mat u = Mat::Identity(3, 3);
    for (const auto& g : gates) u = g.matrix() * u;
    return u;
}

int pulse_count(const std::vector<Gate>& gates) {
    int n = 0;
    for (const auto& g : gates)
        if (g.kind != GateKind::Z01 && g.kind != GateKind::Z12) ++n;
    return n;
}

std::vector<Gate> decompose_su3(const Mat& u, int target, double tol) {
    if (u.rows() != 3 || u.cols() != 3) throw std::invalid_argument("decompose_su3: need 3x3");
    if (!is_unitary(u, tol)) throw std::invalid_argument("decompose_su3: input not unitary");

    std::vector<Gate> circuit_order;

    // diagonal fast path: virtual Z gates only
    if (nearly_diagonal(u, 1e-13)) {
        const double p0 = std::arg(u(0, 0)), p1 = std::arg(u(1, 1)), p2 = std::arg(u(2, 2));
        push_z(circuit_order, true, target, p1 - p0);
        push_z(circuit_order, false, target, p2 - p1);
        return circuit_order;
    }
    // single native pulse fast path
    for (GateKind k : kSinglePulses) {
        if (phase_aligned_dist(u, native_gate_matrix(k)) < 1e-12)
            return {Gate::fixed(k, {target})};
    }

    // Givens reduction: U = G1d(12) * G2d(01) * diag(w,1,1) * (1 (+) V)(12)
    Mat g1 = Mat::Identity(3, 3);
    {
        const cxd a = u(1, 0), b = u(2, 0);
        const double r = std::sqrt(std::norm(a) + std::norm(b));
        if (std::abs(b) > 1e-15 && r > 1e-15) {
            g1(1, 1) = std::conj(a) / r;
            g1(1, 2) = std::conj(b) / r;
            g1(2, 1) = -b / r;
            g1(2, 2) = a / r;
        }
    }
    Mat t1 = g1 * u;
    Mat g2 = Mat::Identity(3, 3);
    {
        const cxd a = t1(0, 0), b = t1(1, 0);
        const double r = std::sqrt(std::norm(a) + std::norm(b));
        if (std::abs(b) > 1e-15 && r > 1e-15) {
            g2(0, 0) = std::conj(a) / r;
            g2(0, 1) = std::conj(b) / r;
            g2(1, 0) = -b / r;
            g2(1, 1) = a / r;
        }
    }
    Mat b = g2 * t1;
    const cxd w = b(0, 0);
    Mat v12 = Mat::Identity(3, 3);
    v12.block(1, 1, 2, 2) = b.block(1, 1, 2, 2);

    struct Factor {
        Mat m;
        bool diagonal;
        bool sub01;
    };
    Mat dw = Mat::Identity(3, 3);
    dw(0, 0) = w;
    const std::array<Factor, 4> factors = {
        Factor{g1.adjoint(), false, false},
        Factor{g2.adjoint(), false, true},
        Factor{dw, true, false},
        Factor{v12, false, false},
    };

    std::vector<Gate> matrix_order;
    Mat d_acc = Mat::Identity(3, 3);
    for (const auto& f : factors) {
        if (f.diagonal) {
            d_acc = f.m * d_acc;
            continue;
        }
        const Mat fc = d_acc * f.m * d_acc.adjoint();
        if (nearly_diagonal(fc, 1e-13)) {  // block degenerated to phases
            d_acc = fc * d_acc;
            continue;
        }
        const Mat corr = realize_block(matrix_order, fc, f.sub01, target);
        d_acc = corr * d_acc;
    }
    // final diagonal: global phase free, two relative phases via virtual Zs
    const double p0 = std::arg(d_acc(0, 0)), p1 = std::arg(d_acc(1, 1)), p2 = std::arg(d_acc(2, 2));
    std::vector<Gate> tail;
    push_z(tail, true, target, p1 - p0);
    push_z(tail, false, target, p2 - p1);
    matrix_order.insert(matrix_order.end(), tail.begin(), tail.end());

    // matrix order is leftmost-first; circuits apply first op first
    circuit_order.assign(matrix_order.rbegin(), matrix_order.rend());
    return circuit_order;
}

}  // namespace qkt
