#pragma once

#include <optional>
#include <vector>

#include "qkt/linalg.hpp"

namespace qkt {

/// Label (x, z) of a generalized Pauli W = X^x Z^z on n qutrits, entries mod 3.
/// Labels form a projective group under componentwise addition mod 3.
struct WeylLabel {
    std::vector<int> x;
    std::vector<int> z;

    WeylLabel() = default;
    WeylLabel(std::vector<int> x_, std::vector<int> z_) : x(std::move(x_)), z(std::move(z_)) {}

    int n() const { return static_cast<int>(x.size()); }
    bool is_identity() const;
    bool operator==(const WeylLabel& o) const { return x == o.x && z == o.z; }

    /// componentwise sum mod 3 (projective group law)
    WeylLabel operator+(const WeylLabel& o) const;

    /// pack into [0, 9^n): per-qutrit digit 3*x+z, qutrit 0 most significant
    int index() const;
    static WeylLabel from_index(int idx, int n);
};

/// number of labels on n qutrits, 9^n
int weyl_count(int n);

/// single-qutrit shift X |j> = |j+1 mod 3> and clock Z |j> = w^j |j>
Mat weyl_x();
Mat weyl_z();

/// W = tensor product over qutrits of X^{x_k} Z^{z_k}
Mat weyl_matrix(const WeylLabel& label);

/// character chi_V(W) = tr(V^dag W V W^dag)/3^n, a power of omega3;
/// depends only on the labels (projective)
cxd weyl_character(const WeylLabel& v, const WeylLabel& w);

/// Gell-Mann element: 0 = I3, 1..8 = lambda_1..lambda_8
Mat gellmann_matrix(int idx);

/// tensor product over the index tuple, one factor per qutrit
Mat gellmann_product(const std::vector<int>& idxs);

/// Trace-orthonormal Hermitian product basis used for PTMs: identity-normalized
/// element first, then tuples in lexicographic order. Cached per n.
const std::vector<Mat>& ptm_basis(int n);

/// A channel: unitary conjugation, an explicit Kraus set, or a superoperator
/// acting on column-major vec(rho).
struct Channel {
    Mat unitary;
    std::vector<Mat> kraus;  // takes precedence over unitary
    Mat superop;             // takes precedence over both

    static Channel from_unitary(Mat u) { return Channel{std::move(u), {}, {}}; }
    static Channel from_kraus(std::vector<Mat> ks) { return Channel{{}, std::move(ks), {}}; }
    static Channel from_superop(Mat s) { return Channel{{}, {}, std::move(s)}; }
    static Channel depolarizing(double p, int dim);

    int dim() const {
        if (superop.size() > 0) return static_cast<int>(std::lround(std::sqrt(superop.rows())));
        return static_cast<int>(kraus.empty() ? unitary.rows() : kraus[0].rows());
    }
    Mat apply(const Mat& rho) const;
};

/// transfer matrix in the normalized Gell-Mann product basis,
/// entry (A, B) = tr(A^dag Lambda(B)); real for Hermiticity-preserving maps
RMat channel_to_ptm(const Channel& channel);
inline RMat unitary_to_ptm(const Mat& u) { return channel_to_ptm(Channel::from_unitary(u)); }

/// Conjugation action of a Clifford on Weyl labels: U W_l U^dag ~ W_{perm[l]}.
struct CliffordAction {
    std::vector<int> perm;  // by packed label index
    int apply(int label_index) const { return perm[label_index]; }
    WeylLabel apply(const WeylLabel& l) const { return WeylLabel::from_index(perm[l.index()], l.n()); }
};

/// Returns the induced label permutation if u normalizes the Weyl group
/// (every U W U^dag proportional to a Weyl within tol), absent otherwise.
std::optional<CliffordAction> is_clifford(const Mat& u, double tol = 1e-9);

}  // namespace qkt
