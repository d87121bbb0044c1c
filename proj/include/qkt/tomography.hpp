#pragma once

#include <functional>

#include "qkt/sim.hpp"

namespace qkt {
namespace tomo {

/// the 9 informationally complete per-qutrit setting gates, as matrices;
/// used both for state preparation (applied to |0>) and pre-measurement
const std::vector<Mat>& setting_gates();

/// POVM element of outcome `outcome` under per-qutrit settings (sa, sb):
/// G^dag |outcome><outcome| G with G = g_sa (x) g_sb
Mat povm_element(int sa, int sb, int outcome);

/// two-qutrit preparation state for per-qutrit settings (sa, sb)
Mat prep_state(int sa, int sb);

/// rank of the measurement map spanned by all POVM elements (81 when complete)
int measurement_map_rank();

struct ReconstructionResult {
    Mat estimate;                    // density matrix (9x9) or Choi (81x81)
    RMat ptm;                        // filled for process reconstructions
    std::vector<double> loglik_trace;
    int iterations = 0;
    bool converged = false;
    double min_eigenvalue = 0.0;     // physicality diagnostics
    double trace_error = 0.0;
};

struct MleOptions {
    int max_iterations = 5000;
    double rel_tol = 1e-10;
    int shots_floor = 10;
};

/// counts[setting 0..80][outcome 0..8] -> MLE density matrix (iterative RrhoR
/// with dilution fallback; log-likelihood is non-decreasing across iterations)
ReconstructionResult state_mle(const std::vector<std::vector<int>>& counts,
                               const MleOptions& opts = {});

/// full state tomography of the output of `prep` on |00>, simulated with shots
ReconstructionResult state_tomography(const Circuit& prep, const Backend& backend,
                                      int shots_per_setting, Rng& rng,
                                      const MleOptions& opts = {});

/// counts[prep 0..80][setting 0..80][outcome 0..8] -> MLE CPTP map (Choi-space
/// ascent with alternating TP/PSD projections), reported as a PTM
ReconstructionResult process_mle(const std::vector<std::vector<std::vector<int>>>& counts,
                                 const MleOptions& opts = {});

/// full process tomography of `gate` under the backend
ReconstructionResult process_tomography(const Circuit& gate, const Backend& backend,
                                        int shots_per_setting, Rng& rng,
                                        const MleOptions& opts = {});

/// process fidelity tr(E_ideal^T E_exp)/D^2 between PTMs, D = 9
double process_fidelity(const RMat& e_exp, const RMat& e_ideal);

/// state fidelity <psi|rho|psi> for a pure target
double state_fidelity(const Mat& rho, const Vec& target);

/// Choi (input (x) output blocks) -> PTM in the Gell-Mann product basis
RMat choi_to_ptm(const Mat& choi);

}  // namespace tomo
}  // namespace qkt
