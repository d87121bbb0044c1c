#pragma once

#include <optional>

#include "qkt/calibrate.hpp"
#include "qkt/cb.hpp"
#include "qkt/device.hpp"
#include "qkt/io.hpp"
#include "qkt/synthesis.hpp"
#include "qkt/xeb.hpp"

namespace qkt {
namespace config {

/// device block: {"preset": name} or {"file": path}
DeviceParams parse_device(const json& j, const std::string& context);

/// noise block applied to the gate-level simulator backends
NoiseModel parse_noise(const json& j, const std::string& context);

struct SweepAlphaConfig {
    DeviceParams device;
    std::string axis;    // phase | amplitude | frequency
    std::string method;  // perturbative | propagate
    int points = 21;
    double start = 0.0, stop = 0.0;        // rad for phase, Hz otherwise
    DriveParams drive;                     // fixed parameters
    std::vector<double> durations;         // for the propagate method
    double clip_hz = 3e6;                  // |alpha| clip in frequency sweeps
};
SweepAlphaConfig parse_sweep_alpha(const json& j);

struct CalibrateCmdConfig {
    DeviceParams device;
    TwoQutritTarget target = TwoQutritTarget::CZ;
    CalibrationConfig search;
    bool decoherent_report = false;
};
CalibrateCmdConfig parse_calibrate(const json& j);

struct CbCmdConfig {
    cb::CBConfig cb;
    NoiseModel noise;
    std::string cycle_name;  // cz | czdag | ref
};
CbCmdConfig parse_cb(const json& j);

struct XebCmdConfig {
    xeb::XEBConfig xeb;
    NoiseModel noise;
};
XebCmdConfig parse_xeb(const json& j);

struct TomographyCmdConfig {
    std::string mode;     // state | process
    std::string circuit;  // bell | cz | czdag | identity | path to a circuit json
    NoiseModel noise;
    int shots = 2000;
};
TomographyCmdConfig parse_tomography(const json& j);

struct SynthesizeCmdConfig {
    GateKind gate = GateKind::CZ;
    synth::TargetClass targets = synth::TargetClass::Clifford;
    int n_targets = 50;
    int max_depth = 6;
    synth::CoverageOptions coverage;
};
SynthesizeCmdConfig parse_synthesize(const json& j);

struct VerifyCmdConfig {
    DeviceParams device;
    std::string schedule_file;
    TwoQutritTarget target = TwoQutritTarget::CZ;
    int repetitions = 3;
};
VerifyCmdConfig parse_verify(const json& j);

/// named circuits used by the tomography command
Circuit named_circuit(const std::string& name);

GateKind parse_gate_name(const std::string& name);
TwoQutritTarget parse_target_name(const std::string& name);

}  // namespace config
}  // namespace qkt
