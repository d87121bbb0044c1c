#include "qkt/sim.hpp"

#include <algorithm>
#include <stdexcept>

#include "qkt/algebra.hpp"

namespace qkt {

StateVector basis_state(int n_qutrits, const std::vector<int>& trits) {
    int dim = 1;
    for (int i = 0; i < n_qutrits; ++i) dim *= 3;
    int idx = 0;
    for (int t : trits) idx = idx * 3 + t;
    StateVector psi = StateVector::Zero(dim);
    psi(idx) = 1.0;
    return psi;
}

namespace {

/// index strides and gather tables for a k-local operator
struct LocalIndexing {
    std::vector<int> offsets;  // 3^k offsets of the targeted digits
    std::vector<int> bases;    // dim/3^k base indices of the untouched digits
};

LocalIndexing local_indexing(const std::vector<int>& targets, int n) {
    std::vector<int> stride(n, 1);
    for (int q = n - 2; q >= 0; --q) stride[q] = stride[q + 1] * 3;
    const int k = static_cast<int>(targets.size());
    int sub = 1;
    for (int i = 0; i < k; ++i) sub *= 3;

    LocalIndexing ix;
    ix.offsets.resize(sub);
    for (int a = 0; a < sub; ++a) {
        int off = 0, aa = a;
        for (int t = k - 1; t >= 0; --t) {
            off += (aa % 3) * stride[targets[t]];
            aa /= 3;
        }
        ix.offsets[a] = off;
    }
    std::vector<int> rest;
    for (int q = 0; q < n; ++q)
        if (std::find(targets.begin(), targets.end(), q) == targets.end()) rest.push_back(q);
    int rest_count = 1;
    for (std::size_t i = 0; i < rest.size(); ++i) rest_count *= 3;
    ix.bases.resize(rest_count);
    for (int r = 0; r < rest_count; ++r) {
        int base = 0, rr = r;
        for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
            base += (rr % 3) * stride[*it];
            rr /= 3;
        }
        ix.bases[r] = base;
    }
    return ix;
}

void apply_local_sv(const Mat& u, const LocalIndexing& ix, cxd* psi) {
    const int sub = static_cast<int>(ix.offsets.size());
    std::vector<cxd> tmp(sub);
    for (int base : ix.bases) {
        for (int a = 0; a < sub; ++a) {
            cxd acc(0, 0);
            for (int b = 0; b < sub; ++b) acc += u(a, b) * psi[base + ix.offsets[b]];
            tmp[a] = acc;
        }
        for (int a = 0; a < sub; ++a) psi[base + ix.offsets[a]] = tmp[a];
    }
}

void apply_unitary_sv(const Gate& g, StateVector& psi, int n) {
    const Mat u = g.matrix();
    const auto ix = local_indexing(g.targets, n);
    apply_local_sv(u, ix, psi.data());
}

void apply_local_unitary_dm(const Mat& u, const std::vector<int>& targets, DensityMatrix& rho,
                            int n) {
    const auto ix = local_indexing(targets, n);
    // rho <- U rho: every column is a state vector
    for (Eigen::Index c = 0; c < rho.cols(); ++c) apply_local_sv(u, ix, rho.col(c).data());
    // rho <- rho U^dag: conjugate action on rows via the transposed layout
    const Mat uc = u.conjugate();
    Mat rt = rho.transpose();
    for (Eigen::Index c = 0; c < rt.cols(); ++c) apply_local_sv(uc, ix, rt.col(c).data());
    rho = rt.transpose();
}

void apply_gate_dm(const Gate& g, DensityMatrix& rho, int n) {
    if (!g.is_channel()) {
        apply_local_unitary_dm(g.matrix(), g.targets, rho, n);
        return;
    }
    // depolarize the joint space of the targeted qutrits
    const double p = g.params.at(0);
    if (static_cast<int>(g.targets.size()) == n) {
        const double dim = static_cast<double>(rho.rows());
        rho = p * rho + (1.0 - p) * rho.trace() / dim * Mat::Identity(rho.rows(), rho.cols());
        return;
    }
    // partial depolarization: average the targeted qutrits over the Weyl group
    // D_p(rho) = p rho + (1-p) tr_T(rho) (x) I/d via the twirling sum
    int d_sub = 1;
    for (std::size_t i = 0; i < g.targets.size(); ++i) d_sub *= 3;
    const int nsub = static_cast<int>(g.targets.size());
    Mat acc = Mat::Zero(rho.rows(), rho.cols());
    for (int l = 0; l < weyl_count(nsub); ++l) {
        Mat term = rho;
        apply_local_unitary_dm(weyl_matrix(WeylLabel::from_index(l, nsub)), g.targets, term, n);
        acc += term;
    }
    rho = p * rho + (1.0 - p) / static_cast<double>(d_sub * d_sub) * acc;
}

}  // namespace

StateVector run(const Circuit& c, StateVector psi) {
    for (const auto& g : c.ops) {
        if (g.is_channel())
            throw std::invalid_argument("run: channel gate requires the density-matrix path");
        apply_unitary_sv(g, psi, c.n_qutrits);
    }
    return psi;
}

DensityMatrix run(const Circuit& c, DensityMatrix rho) {
    for (const auto& g : c.ops) apply_gate_dm(g, rho, c.n_qutrits);
    return rho;
}

RVec outcome_probabilities(const StateVector& psi) { return psi.cwiseAbs2(); }

RVec outcome_probabilities(const DensityMatrix& rho) { return rho.diagonal().real().cwiseMax(0.0); }

std::string tritstring(int index, int n_qutrits) {
    std::string s(n_qutrits, '0');
    for (int q = n_qutrits - 1; q >= 0; --q) {
        s[q] = static_cast<char>('0' + index % 3);
        index /= 3;
    }
    return s;
}

std::vector<int> sample_counts(const RVec& probs, int n_shots, Rng& rng,
                               const std::optional<RMat>& confusion) {
    RVec p = probs;
    if (confusion) {
        const RMat& c = *confusion;
        if (c.rows() != p.size() || c.cols() != p.size())
            throw std::invalid_argument("confusion matrix dimension mismatch");
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            const double colsum = c.col(j).sum();
            if (std::abs(colsum - 1.0) > 1e-9 || c.col(j).minCoeff() < -1e-12)
                throw std::invalid_argument("confusion matrix columns must be stochastic");
        }
        p = c * p;
    }
    const double total = p.sum();
    if (total <= 0.0) throw std::invalid_argument("sample_counts: zero-mass distribution");

    // cumulative inversion
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        acc += std::max(0.0, p(i)) / total;
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    std::vector<int> counts(p.size(), 0);
    for (int s = 0; s < n_shots; ++s) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        ++counts[std::distance(cdf.begin(), it)];
    }
    return counts;
}

std::map<std::string, int> sample_shots(const RVec& probs, int n_qutrits, int n_shots, Rng& rng,
                                        const std::optional<RMat>& confusion) {
    const auto counts = sample_counts(probs, n_shots, rng, confusion);
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0) out[tritstring(static_cast<int>(i), n_qutrits)] = counts[i];
    return out;
}

Circuit Backend::apply_noise(const Circuit& c) const {
    if (!noise.enabled()) return c;
    Circuit out(c.n_qutrits);
    out.seed = c.seed;
    out.label = c.label;
    for (const auto& g : c.ops) {
        out.ops.push_back(g);
        if (g.is_channel()) continue;
        if (g.targets.size() == 2) {
            if (noise.twoq_coherent.size() > 0)
                out.ops.push_back(Gate::custom(g.targets, noise.twoq_coherent));
            if (noise.twoq_depol_p < 1.0)
                out.ops.push_back(Gate::depolarize(g.targets, noise.twoq_depol_p));
        } else if (g.targets.size() == 1 && noise.oneq_depol_p < 1.0) {
            out.ops.push_back(Gate::depolarize(g.targets, noise.oneq_depol_p));
        }
    }
    return out;
}

DensityMatrix Backend::final_state(const Circuit& c) const {
    const Circuit noisy = apply_noise(c);
    int dim = 1;
    for (int i = 0; i < c.n_qutrits; ++i) dim *= 3;
    if (!noisy.has_channel()) {
        StateVector psi = run(noisy, basis_state(c.n_qutrits, std::vector<int>(c.n_qutrits, 0)));
        return psi * psi.adjoint();
    }
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return run(noisy, rho);
}

RVec Backend::probabilities(const Circuit& c) const {
    const Circuit noisy = apply_noise(c);
    if (!noisy.has_channel()) {
        StateVector psi = run(noisy, basis_state(c.n_qutrits, std::vector<int>(c.n_qutrits, 0)));
        return outcome_probabilities(psi);
    }
    return outcome_probabilities(final_state(c));
}

std::vector<int> Backend::sample(const Circuit& c, int shots, Rng& rng) const {
    return sample_counts(probabilities(c), shots, rng);
}

}  // namespace qkt
