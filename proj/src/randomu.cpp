#include "qkt/randomu.hpp"

#include <array>
#include <stdexcept>

#include "qkt/gates.hpp"

namespace qkt {

Mat haar_unitary(int dim, Rng& rng) {
    Mat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        cxd d = r(j, j);
        d = (std::abs(d) > 0) ? d / std::abs(d) : cxd(1, 0);
        q.col(j) *= d;
    }
    // det-normalize into SU(dim)
    const cxd det = q.determinant();
    q *= std::exp(-im * std::arg(det) / static_cast<double>(dim));
    return q;
}

WeylLabel random_weyl_label(int n, Rng& rng) {
    return WeylLabel::from_index(static_cast<int>(rng.below(weyl_count(n))), n);
}

CliffordAction clifford_action_of(const Mat& u) {
    auto a = is_clifford(u);
    if (!a) throw std::invalid_argument("clifford_action_of: not a Clifford");
    return *a;
}

namespace {

CliffordAction compose(const CliffordAction& outer, const CliffordAction& inner) {
    // (outer . inner)(l) = outer(inner(l)): conjugation by U_outer * U_inner
    CliffordAction r;
    r.perm.resize(inner.perm.size());
    for (std::size_t l = 0; l < inner.perm.size(); ++l) r.perm[l] = outer.perm[inner.perm[l]];
    return r;
}

struct GeneratorSet {
    std::array<Mat, 5> mats;
    std::array<CliffordAction, 5> actions;
};

const GeneratorSet& generators() {
    static const GeneratorSet gs = [] {
        GeneratorSet g;
        const Mat h = native_gate_matrix(GateKind::H3);
        Mat s = Mat::Identity(3, 3);
        s(2, 2) = omega3;
        const Mat i3 = Mat::Identity(3, 3);
        g.mats = {kron(h, i3), kron(i3, h), kron(s, i3), kron(i3, s),
                  native_gate_matrix(GateKind::CZ)};
        for (int k = 0; k < 5; ++k) g.actions[k] = clifford_action_of(g.mats[k]);
        return g;
    }();
    return gs;
}

}  // namespace

CliffordSample random_clifford2(Rng& rng, int word_length) {
    const auto& gen = generators();
    Mat u = weyl_matrix(random_weyl_label(2, rng));
    CliffordAction action;  // Weyl conjugation permutes labels trivially
    action.perm.resize(81);
    for (int l = 0; l < 81; ++l) action.perm[l] = l;
    for (int i = 0; i < word_length; ++i) {
        const int k = static_cast<int>(rng.below(5));
        u = gen.mats[k] * u;
        action = compose(gen.actions[k], action);
    }
    return CliffordSample{std::move(u), std::move(action)};
}

CliffordAction random_clifford2_action(Rng& rng, int word_length) {
    const auto& gen = generators();
    (void)random_weyl_label(2, rng);  // keep the draw sequence aligned
    CliffordAction action;
    action.perm.resize(81);
    for (int l = 0; l < 81; ++l) action.perm[l] = l;
    for (int i = 0; i < word_length; ++i)
        action = compose(gen.actions[static_cast<int>(rng.below(5))], action);
    return action;
}

}  // namespace qkt
