#pragma once

#include "qkt/sim.hpp"
#include "qkt/stats.hpp"

namespace qkt {
namespace xeb {

struct XEBConfig {
    GateKind gate = GateKind::CZDag;
    std::vector<int> depths{2, 5, 10, 15, 20};
    int n_random = 30;  // circuits per depth
    int shots = 4096;
};

/// depth-M random circuit: M cycles of (Haar SU(3) on each qutrit, then the
/// two-qutrit gate), plus its ideal outcome distribution
struct XEBCircuit {
    Circuit circuit;
    RVec ideal;  // 9 outcome probabilities
};
XEBCircuit xeb_circuit(GateKind gate, int depth, Rng& rng);

/// linear cross entropy H(p1, p2) = sum_x p1(x) p2(x)
double linear_cross_entropy(const RVec& p1, const RVec& p2);

/// F_XEB = (H(p,q) - H(p,u)) / (H(p,p) - H(p,u)); throws on uniform p
double f_xeb(const RVec& p_ideal, const RVec& q_measured);

/// speckle purity from the spread of one tritstring's probability across
/// random circuits: Var(p) D^2 (D+1)/(D-1), D = 9
double speckle_purity(const std::vector<double>& probs_of_tritstring, int shots = 0);

struct SpecklePoint {
    double purity = 0.0;    // mean of the 9 per-tritstring estimates
    double stderr_p = 0.0;  // jackknife over circuits
};

struct XEBResult {
    std::vector<int> depths;
    std::vector<double> fidelity_per_depth;   // origin-fit slope at each depth
    std::vector<SpecklePoint> speckle_per_depth;
    double cycle_fidelity = 0.0;              // rate of A f^M across depths
    double cycle_fidelity_stderr = 0.0;
    double purity_limit = 0.0;                // sqrt of the speckle decay rate
    // raw per-depth per-circuit data for reports
    std::vector<std::vector<RVec>> ideal_probs;
    std::vector<std::vector<std::vector<int>>> counts;
};

XEBResult run_xeb(const XEBConfig& config, const Backend& backend, Rng& rng);

struct PorterThomasResult {
    double ks_statistic = 0.0;
    double p_value = 0.0;
    bool pass = false;  // at alpha = 0.01
    double uniform_spread = 0.0;  // max |p - 1/9| for the degenerate check
    bool uniform_limit = false;
};

/// KS test of per-circuit probabilities against the Porter-Thomas CDF
PorterThomasResult porter_thomas_test(const std::vector<double>& probs, double alpha = 0.01);

}  // namespace xeb
}  // namespace qkt
