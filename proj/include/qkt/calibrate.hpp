#pragma once

#include "qkt/crosskerr.hpp"
#include "qkt/rng.hpp"

namespace qkt {

enum class TwoQutritTarget { CZ, CZDag };

struct CalibrationConfig {
    int omega_grid_points = 15;
    double omega_margin = 2.0 * pi * 8e6;   // keep away from the 1->2 poles, rad/s
    double amp_max = 2.0 * pi * 22e6;
    double amp_nominal = 2.0 * pi * 11e6;
    double ramp = 20e-9;
    double tau_max = 2.5e-6;                // per segment
    int refine_evals = 180;                 // Nelder-Mead budget on (amp, phi, tau)
    double fidelity_goal = 0.9995;
    int top_candidates = 3;
    int steps_per_ramp = 384;
};

struct CalibrationReport {
    PulseSchedule schedule;
    double fidelity = 0.0;       // noiseless process fidelity to the target
    double gate_time = 0.0;      // seconds, drive segments summed
    double leakage = 0.0;
    bool converged = false;
    int propagations = 0;
    std::string target_name;
};

/// target unitary (9x9) for a calibration target
Mat target_unitary(TwoQutritTarget t);

/// Predict a segment duration tau such that the echoed evolution lands the
/// entangling phases of the target: solves S1*tau = -phi11 (mod 2pi) and
/// S2*tau = -phi12 (mod 2pi) jointly; returns 0 when no branch under tau_max.
double solve_tau(double s1, double s2, TwoQutritTarget target, double tau_max);

/// Search (omega_d, amp, phi, tau) so the echoed two-segment schedule realizes
/// the target up to virtual-Z cleanup; the returned schedule carries the solved
/// virtual-Z angles.
CalibrationReport calibrate_gate(const DeviceParams& dev, TwoQutritTarget target,
                                 const CalibrationConfig& cfg = {});

/// process fidelity of a propagated 9x9 gate (possibly slightly non-unitary)
/// against a unitary target: |tr(U^dag V)|^2 / 81
double gate_fidelity(const Mat& v, const Mat& target);

/// best virtual-Z angles {c01, c12, t01, t12} maximizing gate_fidelity of
/// (Zc (x) Zt) * u against the target; fixed-point phase alignment
std::array<double, 4> solve_virtual_z(const Mat& u, const Mat& target);

/// Full measurement-driven protocol: Hadamards, drive for each duration, state
/// tomography with shots, phase unwrapping, linear slope fit per channel.
struct RamseyResult {
    AlphaRates rates;
    AlphaRates stderr_rates;
    std::vector<std::array<double, 4>> phases;  // per duration
};
RamseyResult ramsey_protocol_sim(const DeviceParams& dev, const DriveParams& drv,
                                 const std::vector<double>& durations, int shots_per_setting,
                                 Rng& rng, bool decoherence = false, double ramp = 20e-9);

/// same protocol against a caller-supplied evolution (duration -> channel);
/// lets tests drive the tomography/unwrap/fit machinery with an exact oracle
RamseyResult ramsey_protocol_sim(const std::function<Channel(double)>& evolve,
                                 const std::vector<double>& durations, int shots_per_setting,
                                 Rng& rng);

}  // namespace qkt
