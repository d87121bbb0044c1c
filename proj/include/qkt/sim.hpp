#pragma once

#include <map>
#include <optional>
#include <string>

#include "qkt/circuit.hpp"
#include "qkt/rng.hpp"

namespace qkt {

using StateVector = Vec;
using DensityMatrix = Mat;

StateVector basis_state(int n_qutrits, const std::vector<int>& trits);

/// sequential application of all ops; throws if a channel gate meets the
/// state-vector path
StateVector run(const Circuit& c, StateVector psi);
DensityMatrix run(const Circuit& c, DensityMatrix rho);

/// Born probabilities of computational outcomes
RVec outcome_probabilities(const StateVector& psi);
RVec outcome_probabilities(const DensityMatrix& rho);

std::string tritstring(int index, int n_qutrits);

/// multinomial draw from the Born distribution, optionally post-composed with
/// a readout confusion matrix (columns sum to 1)
std::map<std::string, int> sample_shots(const RVec& probs, int n_qutrits, int n_shots, Rng& rng,
                                        const std::optional<RMat>& confusion = std::nullopt);

/// counts drawn per outcome index (same sampling as sample_shots)
std::vector<int> sample_counts(const RVec& probs, int n_shots, Rng& rng,
                               const std::optional<RMat>& confusion = std::nullopt);

/// Error rules applied by the simulation backend: a depolarizing channel
/// and/or a fixed unitary inserted after every two-qutrit operation, and
/// optionally after every single-qutrit operation.
struct NoiseModel {
    double twoq_depol_p = 1.0;   // D_p after each 2q op; 1 = off
    double oneq_depol_p = 1.0;   // D_p on the qutrit after each 1q op; 1 = off
    Mat twoq_coherent;           // 9x9 unitary after each 2q op; empty = off

    bool enabled() const {
        return twoq_depol_p < 1.0 || oneq_depol_p < 1.0 || twoq_coherent.size() > 0;
    }
};

/// Executes circuits and samples measurement outcomes under a noise model.
/// Distinct circuits share no mutable state; execution is safe to parallelize.
struct Backend {
    NoiseModel noise;

    /// noise rules woven into the circuit as explicit channel/unitary ops
    Circuit apply_noise(const Circuit& c) const;

    /// final density matrix (noise included)
    DensityMatrix final_state(const Circuit& c) const;

    /// outcome counts by tritstring index
    std::vector<int> sample(const Circuit& c, int shots, Rng& rng) const;

    /// exact Born probabilities (noise included)
    RVec probabilities(const Circuit& c) const;
};

}  // namespace qkt
