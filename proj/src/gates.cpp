#include "qkt/gates.hpp"

#include <map>
#include <stdexcept>

#include "qkt/algebra.hpp"

namespace qkt {

namespace {

/// exp(-i theta/2 P) for P in {X,Y} embedded in the (j,k) two-level subspace
Mat subspace_rotation(int j, int k, double theta, bool y_axis) {
    Mat m = Mat::Identity(3, 3);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    if (!y_axis) {
        m(j, j) = c;     m(j, k) = -im * s;
        m(k, j) = -im * s; m(k, k) = c;
    } else {
        m(j, j) = c;  m(j, k) = -s;
        m(k, j) = s;  m(k, k) = c;
    }
    return m;
}

Mat h3_matrix() {
    Mat h(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) h(j, k) = std::pow(omega3, (j * k) % 3);
    return h / std::sqrt(3.0);
}

Mat cz_matrix(bool dagger) {
    Mat m = Mat::Zero(9, 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int e = dagger ? imod(-i * j, 3) : (i * j) % 3;
            m(3 * i + j, 3 * i + j) = std::pow(omega3, e);
        }
    return m;
}

Mat csum_matrix() {
    Mat m = Mat::Zero(9, 9);
    for (int c = 0; c < 3; ++c)
        for (int t = 0; t < 3; ++t) m(3 * c + (t + c) % 3, 3 * c + t) = 1.0;
    return m;
}

}  // namespace

Mat cinc_matrix(int control_state) {
    Mat m = Mat::Zero(9, 9);
    for (int c = 0; c < 3; ++c)
        for (int t = 0; t < 3; ++t) {
            const int t2 = (c == control_state) ? (t + 1) % 3 : t;
            m(3 * c + t2, 3 * c + t) = 1.0;
        }
    return m;
}

Mat cex_matrix(int control_state) {
    Mat m = Mat::Zero(9, 9);
    for (int c = 0; c < 3; ++c)
        for (int t = 0; t < 3; ++t) {
            int t2 = t;
            if (c == control_state && t < 2) t2 = 1 - t;
            m(3 * c + t2, 3 * c + t) = 1.0;
        }
    return m;
}

namespace {

const std::map<GateKind, const char*> kNames = {
    {GateKind::X01Half, "x01_half"}, {GateKind::X12Half, "x12_half"},
    {GateKind::Y01Half, "y01_half"}, {GateKind::Y12Half, "y12_half"},
    {GateKind::X01Pi, "x01_pi"}, {GateKind::X12Pi, "x12_pi"},
    {GateKind::Y01Pi, "y01_pi"}, {GateKind::Y12Pi, "y12_pi"},
    {GateKind::Z01, "z01"}, {GateKind::Z12, "z12"},
    {GateKind::H3, "h3"}, {GateKind::H3Dag, "h3dag"},
    {GateKind::CZ, "cz"}, {GateKind::CZDag, "czdag"}, {GateKind::CSUM, "csum"},
    {GateKind::Cex, "cex"}, {GateKind::Cinc, "cinc"},
    {GateKind::SU3, "su3"}, {GateKind::CustomUnitary, "custom"},
    {GateKind::DepolarizeChannel, "depolarize"},
};

}  // namespace

const char* gate_kind_name(GateKind k) { return kNames.at(k); }

GateKind gate_kind_from_name(const std::string& name) {
    for (const auto& [k, n] : kNames)
        if (name == n) return k;
    throw std::invalid_argument("unknown gate kind: " + name);
}

bool gate_kind_is_channel(GateKind k) { return k == GateKind::DepolarizeChannel; }

int gate_kind_arity(GateKind k) {
    switch (k) {
        case GateKind::CZ: case GateKind::CZDag: case GateKind::CSUM:
        case GateKind::Cex: case GateKind::Cinc:
            return 2;
        case GateKind::CustomUnitary: case GateKind::DepolarizeChannel:
            return 0;  // from targets
        default:
            return 1;
    }
}

Mat native_gate_matrix(GateKind kind) {
    switch (kind) {
        case GateKind::X01Half: return subspace_rotation(0, 1, pi / 2, false);
        case GateKind::X12Half: return subspace_rotation(1, 2, pi / 2, false);
        case GateKind::Y01Half: return subspace_rotation(0, 1, pi / 2, true);
        case GateKind::Y12Half: return subspace_rotation(1, 2, pi / 2, true);
        case GateKind::X01Pi: return subspace_rotation(0, 1, pi, false);
        case GateKind::X12Pi: return subspace_rotation(1, 2, pi, false);
        case GateKind::Y01Pi: return subspace_rotation(0, 1, pi, true);
        case GateKind::Y12Pi: return subspace_rotation(1, 2, pi, true);
        case GateKind::H3: return h3_matrix();
        case GateKind::H3Dag: return h3_matrix().adjoint();
        case GateKind::CZ: return cz_matrix(false);
        case GateKind::CZDag: return cz_matrix(true);
        case GateKind::CSUM: return csum_matrix();
        case GateKind::Cex: return cex_matrix();
        case GateKind::Cinc: return cinc_matrix();
        default:
            throw std::invalid_argument("native_gate_matrix: parameterized or channel kind");
    }
}

Mat z01_matrix(double phi) {
    Mat m = Mat::Identity(3, 3);
    m(0, 0) = std::exp(-im * phi);
    return m;
}

Mat z12_matrix(double phi) {
    Mat m = Mat::Identity(3, 3);
    m(2, 2) = std::exp(im * phi);
    return m;
}

Mat su3_matrix(const std::vector<double>& theta8) {
    if (theta8.size() != 8) throw std::invalid_argument("su3_matrix: need 8 parameters");
    Mat h = Mat::Zero(3, 3);
    for (int k = 0; k < 8; ++k) h += theta8[k] * gellmann_matrix(k + 1);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Vec phases = (-im * es.eigenvalues().array().cast<cxd>()).exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Gate Gate::su3(int q, std::vector<double> theta8) {
    Gate g{GateKind::SU3, {q}, std::move(theta8)};
    if (g.params.size() != 8) throw std::invalid_argument("su3 gate: need 8 parameters");
    return g;
}

Gate Gate::custom(std::vector<int> t, const Mat& u) {
    Gate g{GateKind::CustomUnitary, std::move(t), {}};
    g.params.reserve(2 * u.size());
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            g.params.push_back(u(i, j).real());
            g.params.push_back(u(i, j).imag());
        }
    return g;
}

Mat Gate::matrix() const {
    switch (kind) {
        case GateKind::Z01: return z01_matrix(params.at(0));
        case GateKind::Z12: return z12_matrix(params.at(0));
        case GateKind::SU3: return su3_matrix(params);
        case GateKind::CustomUnitary: {
            int dim = 1;
            for (std::size_t i = 0; i < targets.size(); ++i) dim *= 3;
            if (params.size() != static_cast<std::size_t>(2 * dim * dim))
                throw std::invalid_argument("custom gate: wrong parameter count");
            Mat u(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    u(i, j) = cxd(params[2 * (i * dim + j)], params[2 * (i * dim + j) + 1]);
            return u;
        }
        case GateKind::DepolarizeChannel:
            throw std::invalid_argument("Gate::matrix: channel has no unitary matrix");
        default:
            return native_gate_matrix(kind);
    }
}

}  // namespace qkt
