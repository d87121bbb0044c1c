#pragma once

#include <complex>

#include "qkt/algebra.hpp"
#include "qkt/sim.hpp"

namespace qkt {
namespace cb {

struct CBConfig {
    Circuit cycle;                    // the dressed cycle C (must be Clifford)
    std::vector<int> depths{0, 4, 8};
    std::vector<WeylLabel> channels;  // non-identity two-qutrit labels
    int n_randomizations = 30;
    int shots = 2048;
};

/// all 80 non-identity two-qutrit Weyl labels
std::vector<WeylLabel> all_channels();
/// deterministic pseudorandom subset (hardware-style presets)
std::vector<WeylLabel> channel_subset(int count, std::uint64_t seed);

/// One randomized CB circuit body: W_0, C, W_1, C, ..., W_m with the random
/// Weyl layers compiled into native pulses.
struct CBCircuit {
    Circuit circuit;       // body only; prep/measurement are added by run_cb
    cxd weight;            // prod_j conj(chi_{U_j}(W_j)) with U_j = C^j U_0 C^-j
    WeylLabel meas_label;  // label of C^m U_0 C^-m
    cxd meas_phase;        // phase of C^m W_{U0} C^-m relative to the label matrix
};
CBCircuit cb_circuit(const Circuit& cycle, int m, const WeylLabel& u0, Rng& rng);

struct DecayRecord {
    WeylLabel channel;
    double amplitude = 0.0;
    double decay = 0.0;
    double decay_stderr = 0.0;
    bool ok = false;
};

struct CBResult {
    std::vector<DecayRecord> records;
    double composite_fidelity = 0.0;
    double composite_stderr = 0.0;
    // raw per (channel, depth, randomization) complex expectation estimates;
    // the modulus feeds the variance/unitarity analysis
    std::vector<std::vector<std::vector<cxd>>> raw_expectations;
    std::vector<std::vector<std::vector<double>>> weighted_values;
    std::vector<int> depths;
    int shots = 0;
    int cycle_order = 1;
};

/// Full CB run: per channel, eigen-prepare, interleave random Weyl layers with
/// the cycle, measure in the conjugated Weyl eigenbasis, fit A f^m per channel,
/// aggregate the composite Weyl fidelity (1 + sum f) / (count + 1).
CBResult run_cb(const CBConfig& config, const Backend& backend, Rng& rng);

/// process fidelity of the isolated gate given dressed and reference cycle
/// fidelities: 1 - (D-1)/D (1 - f_dressed/f_ref), D = 9
double isolate_gate_error(double f_dressed, double f_ref);

struct UnitarityEstimate {
    double u = 1.0;
    double stderr_u = 0.0;
    std::vector<double> variance_per_depth;
    std::vector<int> depths;
};

/// Variance of the raw per-circuit expectations across Weyl randomizations,
/// shot-noise subtracted, fitted to the slowest exponential decay; returns its
/// square root. Depths must include >= 2 multiples of the cycle order.
UnitarityEstimate unitarity_from_cb_variance(const CBResult& result);

}  // namespace cb
}  // namespace qkt
