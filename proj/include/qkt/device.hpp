#pragma once

#include <optional>
#include <string>

#include "qkt/linalg.hpp"

namespace qkt {

/// Per-transmon coherence times, seconds.
struct Coherence {
    std::optional<double> t1_01, t1_12;  // relaxation 1->0 and 2->1
    std::optional<double> t2_01, t2_12;  // Ramsey dephasing within each subspace
};

/// Two coupled transmons modeled as Duffing oscillators. All rates in rad/s;
/// JSON device files carry Hz and are converted on load.
struct DeviceParams {
    double omega_c = 0.0, omega_t = 0.0;  // 0->1 angular frequencies
    double eta_c = 0.0, eta_t = 0.0;      // anharmonicities (negative)
    double j_coupling = 0.0;
    int d_trunc = 4;                      // levels kept per transmon
    Coherence coh_c, coh_t;
    std::string name;

    double delta() const { return omega_c - omega_t; }
    double eta_mean() const { return 0.5 * (eta_c + eta_t); }
    /// 1->2 transition angular frequencies
    double omega12_c() const { return omega_c + eta_c; }
    double omega12_t() const { return omega_t + eta_t; }

    std::string to_json() const;
    static DeviceParams from_json(const std::string& text);
    static DeviceParams preset(const std::string& name);  // "cz-pair" | "czdag-pair"
};

/// Simultaneous off-resonant drive on both transmons.
struct DriveParams {
    double omega_d = 0.0;            // drive angular frequency, rad/s
    double amp_c = 0.0, amp_t = 0.0; // drive amplitudes, rad/s
    double phi = 0.0;                // relative phase (target minus control)
};

}  // namespace qkt
