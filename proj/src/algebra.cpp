#include "qkt/algebra.hpp"

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qkt {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double phase_aligned_dist(const Mat& a, const Mat& b) {
    cxd t = (b.adjoint() * a).trace();
    if (std::abs(t) < 1e-300) return (a - b).cwiseAbs().maxCoeff();
    t /= std::abs(t);
    return (a - t * b).cwiseAbs().maxCoeff();
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

bool WeylLabel::is_identity() const {
    for (int v : x)
        if (v % 3 != 0) return false;
    for (int v : z)
        if (v % 3 != 0) return false;
    return true;
}

WeylLabel WeylLabel::operator+(const WeylLabel& o) const {
    WeylLabel r = *this;
    for (std::size_t k = 0; k < x.size(); ++k) {
        r.x[k] = imod(r.x[k] + o.x[k], 3);
        r.z[k] = imod(r.z[k] + o.z[k], 3);
    }
    return r;
}

int WeylLabel::index() const {
    int idx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) idx = idx * 9 + (3 * imod(x[k], 3) + imod(z[k], 3));
    return idx;
}

WeylLabel WeylLabel::from_index(int idx, int n) {
    WeylLabel l{std::vector<int>(n, 0), std::vector<int>(n, 0)};
    for (int k = n - 1; k >= 0; --k) {
        const int d = idx % 9;
        idx /= 9;
        l.x[k] = d / 3;
        l.z[k] = d % 3;
    }
    return l;
}

int weyl_count(int n) {
    int c = 1;
    for (int i = 0; i < n; ++i) c *= 9;
    return c;
}

Mat weyl_x() {
    Mat x = Mat::Zero(3, 3);
    for (int j = 0; j < 3; ++j) x((j + 1) % 3, j) = 1.0;
    return x;
}

Mat weyl_z() {
    Mat z = Mat::Zero(3, 3);
    for (int j = 0; j < 3; ++j) z(j, j) = std::pow(omega3, j);
    return z;
}

namespace {

Mat weyl_factor(int x, int z) {
    static const std::array<Mat, 9> table = [] {
        std::array<Mat, 9> t;
        const Mat X = weyl_x(), Z = weyl_z();
        for (int a = 0; a < 3; ++a) {
            Mat xa = Mat::Identity(3, 3);
            for (int i = 0; i < a; ++i) xa = X * xa;
            for (int b = 0; b < 3; ++b) {
                Mat zb = Mat::Identity(3, 3);
                for (int i = 0; i < b; ++i) zb = Z * zb;
                t[3 * a + b] = xa * zb;
            }
        }
        return t;
    }();
    return table[3 * imod(x, 3) + imod(z, 3)];
}

}  // namespace

Mat weyl_matrix(const WeylLabel& label) {
    Mat w = weyl_factor(label.x[0], label.z[0]);
    for (int k = 1; k < label.n(); ++k) w = kron(w, weyl_factor(label.x[k], label.z[k]));
    return w;
}

cxd weyl_character(const WeylLabel& v, const WeylLabel& w) {
    if (v.n() != w.n()) throw std::invalid_argument("weyl_character: qutrit counts differ");
    // W V = w^(d.a - b.c) V W for V = X^a Z^b, W = X^c Z^d, componentwise
    int e = 0;
    for (int k = 0; k < v.n(); ++k) e += w.z[k] * v.x[k] - v.z[k] * w.x[k];
    return std::pow(omega3, imod(e, 3));
}

Mat gellmann_matrix(int idx) {
    Mat m = Mat::Zero(3, 3);
    switch (idx) {
        case 0: m.setIdentity(); break;
        case 1: m(0, 1) = 1; m(1, 0) = 1; break;
        case 2: m(0, 1) = -im; m(1, 0) = im; break;
        case 3: m(0, 0) = 1; m(1, 1) = -1; break;
        case 4: m(0, 2) = 1; m(2, 0) = 1; break;
        case 5: m(0, 2) = -im; m(2, 0) = im; break;
        case 6: m(1, 2) = 1; m(2, 1) = 1; break;
        case 7: m(1, 2) = -im; m(2, 1) = im; break;
        case 8: {
            const double s = 1.0 / std::sqrt(3.0);
            m(0, 0) = s; m(1, 1) = s; m(2, 2) = -2.0 * s;
            break;
        }
        default: throw std::out_of_range("gellmann_matrix: index must be 0..8");
    }
    return m;
}

Mat gellmann_product(const std::vector<int>& idxs) {
    Mat m = gellmann_matrix(idxs.at(0));
    for (std::size_t k = 1; k < idxs.size(); ++k) m = kron(m, gellmann_matrix(idxs[k]));
    return m;
}

const std::vector<Mat>& ptm_basis(int n) {
    static std::map<int, std::vector<Mat>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<Mat> basis;
    const int count = weyl_count(n);  // 9^n, same count as index tuples
    basis.reserve(count);
    std::vector<int> tuple(n, 0);
    for (int t = 0; t < count; ++t) {
        int v = t;
        for (int k = n - 1; k >= 0; --k) {
            tuple[k] = v % 9;
            v /= 9;
        }
        Mat b = gellmann_product(tuple);
        b /= std::sqrt(std::real((b.adjoint() * b).trace()));
        basis.push_back(std::move(b));
    }
    return cache.emplace(n, std::move(basis)).first->second;
}

Channel Channel::depolarizing(double p, int dim) {
    // D_p(rho) = p rho + (1-p) I/dim, given as a Kraus set
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing: p outside [0,1]");
    std::vector<Mat> ks;
    ks.push_back(std::sqrt(p) * Mat::Identity(dim, dim));
    // (1-p) tr(rho) I/dim as dim^2 scaled matrix units
    const double s = std::sqrt((1.0 - p) / dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            Mat k = Mat::Zero(dim, dim);
            k(i, j) = s;
            ks.push_back(std::move(k));
        }
    return Channel::from_kraus(std::move(ks));
}

Mat Channel::apply(const Mat& rho) const {
    if (superop.size() > 0) {
        const int d = dim();
        const Vec v = superop * Eigen::Map<const Vec>(rho.data(), d * d);
        return Eigen::Map<const Mat>(v.data(), d, d);
    }
    if (kraus.empty()) return unitary * rho * unitary.adjoint();
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const Mat& k : kraus) out += k * rho * k.adjoint();
    return out;
}

RMat channel_to_ptm(const Channel& channel) {
    const int dim = channel.dim();
    int n = 0;
    for (int d = 1; d < dim; d *= 3) ++n;
    if (dim != static_cast<int>(std::pow(3, n)))
        throw std::invalid_argument("channel_to_ptm: dimension is not a power of 3");
    const auto& basis = ptm_basis(n);
    const int nb = static_cast<int>(basis.size());
    RMat ptm(nb, nb);
    for (int b = 0; b < nb; ++b) {
        const Mat image = channel.apply(basis[b]);
        for (int a = 0; a < nb; ++a) {
            // basis elements are Hermitian: tr(A^dag M) = sum conj(A_ij) M_ij
            ptm(a, b) = std::real(basis[a].cwiseProduct(image.conjugate()).sum());
        }
    }
    return ptm;
}

std::optional<CliffordAction> is_clifford(const Mat& u, double tol) {
    const int dim = static_cast<int>(u.rows());
    int n = 0;
    for (int d = 1; d < dim; d *= 3) ++n;
    const int count = weyl_count(n);
    const double d = static_cast<double>(dim);

    std::vector<Mat> weyls(count);
    for (int l = 0; l < count; ++l) weyls[l] = weyl_matrix(WeylLabel::from_index(l, n));

    CliffordAction action;
    action.perm.assign(count, -1);
    for (int l = 0; l < count; ++l) {
        const Mat conj = u * weyls[l] * u.adjoint();
        bool found = false;
        for (int m = 0; m < count; ++m) {
            const cxd overlap = (weyls[m].adjoint() * conj).trace() / d;
            if (std::abs(std::abs(overlap) - 1.0) < 0.5) {
                // candidate: check exact proportionality at unit modulus
                const cxd phase = overlap / std::abs(overlap);
                if ((conj - phase * weyls[m]).cwiseAbs().maxCoeff() <= tol) {
                    action.perm[l] = m;
                    found = true;
                }
                break;  // overlaps with distinct Weyls are exclusive
            }
        }
        if (!found) return std::nullopt;
    }
    return action;
}

}  // namespace qkt
