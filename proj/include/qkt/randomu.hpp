#pragma once

#include "qkt/algebra.hpp"
#include "qkt/rng.hpp"

namespace qkt {

/// Haar-distributed special unitaries (QR of a complex Ginibre matrix with the
/// R-phase fix, then det-normalized into SU(dim)).
Mat haar_unitary(int dim, Rng& rng);
inline Mat haar_su3(Rng& rng) { return haar_unitary(3, rng); }
inline Mat haar_su9(Rng& rng) { return haar_unitary(9, rng); }

WeylLabel random_weyl_label(int n, Rng& rng);

/// Two-qutrit Clifford sample: a uniformly random Weyl operator composed with
/// a random word (length 20) over {H (x) I, I (x) H, S (x) I, I (x) S, CZ}.
/// Also returns the induced label permutation (tracked through the word, so no
/// verification pass is needed by callers that only want the action).
struct CliffordSample {
    Mat unitary;            // 9x9
    CliffordAction action;  // conjugation action on the 81 labels
};
CliffordSample random_clifford2(Rng& rng, int word_length = 20);

/// action-only sampling sharing random_clifford2's draw sequence; used when
/// only the label permutation matters (much cheaper than the matrix product)
CliffordAction random_clifford2_action(Rng& rng, int word_length = 20);

/// label permutations of the generating set, exposed for tests
CliffordAction clifford_action_of(const Mat& u);

}  // namespace qkt
