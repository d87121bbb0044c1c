#pragma once

#include "qkt/gates.hpp"
#include "qkt/rng.hpp"

namespace qkt {
namespace synth {

/// Alternating ansatz: V = L_m G L_{m-1} G ... L_0 with L_k a pair of
/// SU(3) exponentials, 16 parameters per local layer.
struct Ansatz {
    int depth = 0;
    GateKind two_qutrit_gate = GateKind::CZ;

    int n_params() const { return 16 * (depth + 1); }
};

Mat ansatz_unitary(const Ansatz& ansatz, const std::vector<double>& params);

/// infidelity 1 - |tr(V^dag U)|^2 / 81 and its analytic gradient
double infidelity(const Ansatz& ansatz, const std::vector<double>& params, const Mat& target);
double infidelity_grad(const Ansatz& ansatz, const std::vector<double>& params, const Mat& target,
                       std::vector<double>& grad_out);

struct SynthesisOptions {
    int restarts = 50;
    double tol = 1e-6;
    int max_iterations = 1500;
};

struct SynthesisResult {
    std::vector<double> best_params;
    double achieved_infidelity = 1.0;
    int restarts_used = 0;
    bool converged = false;
};

/// BFGS with analytic gradients from uniform random starts in [-pi, pi];
/// stops at the first restart reaching tol
SynthesisResult synthesize(const Mat& target, GateKind gate, int depth, Rng& rng,
                           const SynthesisOptions& opts = {});

enum class TargetClass { Haar, Clifford };

struct CoverageOptions {
    SynthesisOptions synth;
    int rescue_restarts = 200;  // extra budget at the final depth for stuck targets
    int threads = 0;
};

struct CoverageResult {
    std::vector<int> first_success_depth;      // per target, -1 when never reached
    std::vector<double> success_rate;          // cumulative fraction per depth 0..max_depth
    std::vector<std::vector<double>> infidelity_table;  // per target per attempted depth
};

/// success fraction of Haar/Clifford targets versus ansatz depth; success is
/// cumulative in depth (a target solved at depth m counts at all larger m)
CoverageResult coverage_study(GateKind gate, TargetClass target_class, int n_targets,
                              int max_depth, Rng& rng, const CoverageOptions& opts = {});

/// smallest k <= 8 with G^k proportional to the identity (0 if none)
int gate_order(GateKind gate);

}  // namespace synth
}  // namespace qkt
