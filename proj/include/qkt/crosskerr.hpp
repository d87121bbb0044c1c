#pragma once

#include <array>
#include <variant>
#include <vector>

#include "qkt/algebra.hpp"
#include "qkt/device.hpp"

namespace qkt {

/// Cross-Kerr entangling rates on |11>, |12>, |21>, |22>, rad/s.
struct AlphaRates {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    AlphaRates operator+(const AlphaRates& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    std::array<double, 4> as_array() const { return {a11, a12, a21, a22}; }
};

/// thrown when a perturbative formula is evaluated too close to a pole
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Drive-frame RWA Hamiltonian of the coupled driven pair on d_trunc^2 levels:
/// Duffing terms, drive terms Omega_i (e^{i phi_i} a_i + h.c.), exchange coupling.
Mat rwa_hamiltonian(const DeviceParams& dev, const DriveParams& drv);

/// Static (second-order, J^2) cross-Kerr rates in the equal-anharmonicity
/// approximation eta = (eta_c + eta_t)/2.
AlphaRates alpha_static(const DeviceParams& dev);

/// Driven (third-order, Omega_c Omega_t J cos phi) cross-Kerr rates.
AlphaRates alpha_driven(const DeviceParams& dev, const DriveParams& drv);

/// Flat-top cosine drive segment; ramp <= total/2.
struct DriveSegment {
    DriveParams drive;
    double total = 0.0;  // seconds, ramps included
    double ramp = 20e-9;
};
/// instantaneous X12_pi (x) X12_pi echo
struct EchoSegment {};

using ScheduleSegment = std::variant<DriveSegment, EchoSegment>;

struct PulseSchedule {
    std::vector<ScheduleSegment> segments;
    // virtual-Z cleanup angles: {control 01, control 12, target 01, target 12}
    std::array<double, 4> virtual_z{0, 0, 0, 0};

    double total_time() const;
    std::string to_json() const;
    static PulseSchedule from_json(const std::string& text);

    /// two drive rounds of duration tau with interleaved echoes
    static PulseSchedule echoed(const DriveParams& drv, double tau, double ramp);
};

struct PropagateOptions {
    bool decoherence = false;
    int steps_per_ramp = 512;
    double flat_step = 2e-9;       // Lindblad splitting step on flat tops, s
    bool richardson_check = true;  // compare against half-step integration
    double richardson_tol = 1e-6;
};

struct PropagateResult {
    Mat unitary;        // 9x9, dressed qutrit basis (closed system)
    Mat unitary_full;   // d_trunc^2 propagator before projection (closed system)
    Mat superop;        // 81x81, column-major vec convention (decoherent path)
    bool is_channel = false;
    double leakage = 0.0;          // worst-case population left outside the qutrit space
    double richardson_error = 0.0;

    Channel channel() const;
};

/// Time-ordered propagation of the schedule. Closed system returns the
/// truncated-space unitary projected onto the dressed 9-dim qutrit subspace;
/// with decoherence, integrates the Lindblad equation and returns the CPTP
/// map via basis-state propagation.
PropagateResult propagate(const DeviceParams& dev, const PulseSchedule& sched,
                          const PropagateOptions& opts = {});

/// Local-phase-free entangling phase combination of a diagonal-dominant unitary:
/// phi_ij = theta_ij + theta_00 - theta_i0 - theta_0j (mod 2pi).
AlphaRates extract_entangling_phases(const Mat& u, double offdiag_tol = 1e-2);

/// Fitted slopes of the entangling phases across plain drive segments of the
/// given durations; independent of ramp-induced intercepts.
struct SlopeFit {
    AlphaRates rates;
    AlphaRates stderr_rates;
};
SlopeFit measure_alpha_propagated(const DeviceParams& dev, const DriveParams& drv,
                                  const std::vector<double>& durations,
                                  double ramp = 20e-9,
                                  const PropagateOptions& opts = {});

/// dressed-basis transform: columns are the static eigenvectors matched to the
/// 9 bare qutrit labels (d_trunc^2 x 9)
Mat dressed_basis(const DeviceParams& dev, double omega_d);

}  // namespace qkt
