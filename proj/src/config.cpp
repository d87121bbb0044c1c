#include "qkt/config.hpp"

namespace qkt {
namespace config {

namespace {

constexpr double kTwoPi = 2.0 * pi;

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

DeviceParams parse_device(const json& j, const std::string& context) {
    check_fields(j, {"preset", "file"}, context + ".device");
    if (j.contains("preset") == j.contains("file"))
        throw ConfigError(context + ".device: give exactly one of \"preset\" or \"file\"");
    if (j.contains("preset")) {
        try {
            return DeviceParams::preset(j.at("preset").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(context + ".device: " + e.what());
        }
    }
    const auto path = j.at("file").get<std::string>();
    if (!std::filesystem::exists(path))
        throw ConfigError(context + ".device: file not found: " + path);
    return DeviceParams::from_json(read_text_file(path));
}

NoiseModel parse_noise(const json& j, const std::string& context) {
    check_fields(j, {"twoq_depol_p", "oneq_depol_p", "twoq_overrotation"}, context + ".noise");
    NoiseModel n;
    n.twoq_depol_p = get_or(j, "twoq_depol_p", 1.0);
    n.oneq_depol_p = get_or(j, "oneq_depol_p", 1.0);
    if (n.twoq_depol_p < 0 || n.twoq_depol_p > 1 || n.oneq_depol_p < 0 || n.oneq_depol_p > 1)
        throw ConfigError(context + ".noise: depolarizing p must lie in [0,1]");
    const double over = get_or(j, "twoq_overrotation", 0.0);
    if (over != 0.0) {
        // coherent error: extra conditional phase epsilon per unit CZ phase
        Mat u = Mat::Zero(9, 9);
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 3; ++jj)
                u(3 * i + jj, 3 * i + jj) = std::exp(im * over * static_cast<double>((i * jj) % 3));
        n.twoq_coherent = u;
    }
    return n;
}

GateKind parse_gate_name(const std::string& name) {
    if (name == "cz") return GateKind::CZ;
    if (name == "czdag") return GateKind::CZDag;
    if (name == "csum") return GateKind::CSUM;
    if (name == "cinc") return GateKind::Cinc;
    if (name == "cex") return GateKind::Cex;
    throw ConfigError("unknown two-qutrit gate: " + name);
}

TwoQutritTarget parse_target_name(const std::string& name) {
    if (name == "cz") return TwoQutritTarget::CZ;
    if (name == "czdag") return TwoQutritTarget::CZDag;
    throw ConfigError("target must be \"cz\" or \"czdag\", got: " + name);
}

SweepAlphaConfig parse_sweep_alpha(const json& j) {
    check_version(j, "sweep-alpha");
    check_fields(j,
                 {"version", "device", "axis", "method", "points", "start", "stop", "drive",
                  "durations", "clip_hz"},
                 "sweep-alpha");
    SweepAlphaConfig c;
    c.device = parse_device(j.at("device"), "sweep-alpha");
    c.axis = j.at("axis").get<std::string>();
    if (c.axis != "phase" && c.axis != "amplitude" && c.axis != "frequency")
        throw ConfigError("sweep-alpha.axis: must be phase|amplitude|frequency");
    c.method = get_or<std::string>(j, "method", "perturbative");
    if (c.method != "perturbative" && c.method != "propagate")
        throw ConfigError("sweep-alpha.method: must be perturbative|propagate");
    c.points = get_or(j, "points", 21);
    if (c.points < 2) throw ConfigError("sweep-alpha.points: need >= 2");
    c.start = j.at("start").get<double>();
    c.stop = j.at("stop").get<double>();
    c.clip_hz = get_or(j, "clip_hz", 3e6);

    const json drv = j.contains("drive") ? j.at("drive") : json::object();
    check_fields(drv, {"omega_d", "amp", "phi"}, "sweep-alpha.drive");
    const double mid = 0.5 * (c.device.omega12_c() + c.device.omega12_t()) / kTwoPi;
    c.drive.omega_d = get_or(drv, "omega_d", mid) * kTwoPi;
    c.drive.amp_c = c.drive.amp_t = get_or(drv, "amp", 5e6) * kTwoPi;
    c.drive.phi = get_or(drv, "phi", 0.0);

    c.durations = get_or(j, "durations", std::vector<double>{0.4e-6, 0.8e-6, 1.2e-6, 1.6e-6});
    return c;
}

CalibrateCmdConfig parse_calibrate(const json& j) {
    check_version(j, "calibrate");
    check_fields(j,
                 {"version", "device", "target", "omega_grid_points", "amp_max", "ramp", "tau_max",
                  "refine_evals", "fidelity_goal", "decoherent_report"},
                 "calibrate");
    CalibrateCmdConfig c;
    c.device = parse_device(j.at("device"), "calibrate");
    c.target = parse_target_name(j.at("target").get<std::string>());
    c.search.omega_grid_points = get_or(j, "omega_grid_points", c.search.omega_grid_points);
    if (j.contains("amp_max")) c.search.amp_max = j.at("amp_max").get<double>() * kTwoPi;
    if (j.contains("ramp")) c.search.ramp = j.at("ramp").get<double>();
    if (j.contains("tau_max")) c.search.tau_max = j.at("tau_max").get<double>();
    c.search.refine_evals = get_or(j, "refine_evals", c.search.refine_evals);
    c.search.fidelity_goal = get_or(j, "fidelity_goal", c.search.fidelity_goal);
    c.decoherent_report = get_or(j, "decoherent_report", false);
    return c;
}

namespace {

Circuit cycle_circuit(const std::string& name) {
    Circuit c(2);
    c.label = name;
    if (name == "cz")
        c.add(Gate::fixed(GateKind::CZ, {0, 1}));
    else if (name == "czdag")
        c.add(Gate::fixed(GateKind::CZDag, {0, 1}));
    else if (name == "ref")
        c.add(Gate::custom({0, 1}, Mat::Identity(9, 9)));
    else
        throw ConfigError("cycle must be cz|czdag|ref, got: " + name);
    return c;
}

}  // namespace

CbCmdConfig parse_cb(const json& j) {
    check_version(j, "cb");
    check_fields(j, {"version", "cycle", "noise", "depths", "channels", "n_randomizations", "shots"},
                 "cb");
    CbCmdConfig c;
    c.cycle_name = get_or<std::string>(j, "cycle", "czdag");
    c.cb.cycle = cycle_circuit(c.cycle_name);
    c.noise = parse_noise(j.contains("noise") ? j.at("noise") : json::object(), "cb");
    if (j.contains("depths")) c.cb.depths = j.at("depths").get<std::vector<int>>();
    c.cb.n_randomizations = get_or(j, "n_randomizations", 30);
    c.cb.shots = get_or(j, "shots", 2048);

    if (!j.contains("channels")) {
        c.cb.channels = cb::all_channels();
    } else if (j.at("channels").is_string()) {
        const auto name = j.at("channels").get<std::string>();
        if (name == "all")
            c.cb.channels = cb::all_channels();
        else if (name == "paper-czdag") {
            c.cb.channels = cb::channel_subset(53, 0x53u);
            c.cb.depths = {0, 3, 6, 15};
        } else if (name == "paper-cz") {
            c.cb.channels = cb::channel_subset(54, 0x54u);
            c.cb.depths = {0, 3, 6};
        } else {
            throw ConfigError("cb.channels: all|paper-czdag|paper-cz or an integer");
        }
    } else {
        c.cb.channels = cb::channel_subset(j.at("channels").get<int>(), 0x80u);
    }
    return c;
}

XebCmdConfig parse_xeb(const json& j) {
    check_version(j, "xeb");
    check_fields(j, {"version", "gate", "noise", "depths", "n_random", "shots"}, "xeb");
    XebCmdConfig c;
    c.xeb.gate = parse_gate_name(get_or<std::string>(j, "gate", "czdag"));
    c.noise = parse_noise(j.contains("noise") ? j.at("noise") : json::object(), "xeb");
    if (j.contains("depths")) c.xeb.depths = j.at("depths").get<std::vector<int>>();
    c.xeb.n_random = get_or(j, "n_random", 30);
    c.xeb.shots = get_or(j, "shots", 4096);
    return c;
}

Circuit named_circuit(const std::string& name) {
    Circuit c(2);
    c.label = name;
    if (name == "bell") {
        c.add(Gate::fixed(GateKind::H3, {0}));
        c.add(Gate::fixed(GateKind::H3, {1}));
        c.add(Gate::fixed(GateKind::CZ, {0, 1}));
        c.add(Gate::fixed(GateKind::H3Dag, {1}));
    } else if (name == "cz") {
        c.add(Gate::fixed(GateKind::CZ, {0, 1}));
    } else if (name == "czdag") {
        c.add(Gate::fixed(GateKind::CZDag, {0, 1}));
    } else if (name == "identity") {
        c.add(Gate::custom({0, 1}, Mat::Identity(9, 9)));
    } else if (std::filesystem::exists(name)) {
        c = Circuit::from_json(read_text_file(name));
    } else {
        throw ConfigError("tomography.circuit: bell|cz|czdag|identity or a circuit file path");
    }
    return c;
}

TomographyCmdConfig parse_tomography(const json& j) {
    check_version(j, "tomography");
    check_fields(j, {"version", "mode", "circuit", "noise", "shots"}, "tomography");
    TomographyCmdConfig c;
    c.mode = j.at("mode").get<std::string>();
    if (c.mode != "state" && c.mode != "process")
        throw ConfigError("tomography.mode: must be state|process");
    c.circuit = get_or<std::string>(j, "circuit", "bell");
    c.noise = parse_noise(j.contains("noise") ? j.at("noise") : json::object(), "tomography");
    c.shots = get_or(j, "shots", 2000);
    if (c.shots < 10) throw ConfigError("tomography.shots: need >= 10 per setting");
    return c;
}

SynthesizeCmdConfig parse_synthesize(const json& j) {
    check_version(j, "synthesize");
    check_fields(
        j, {"version", "gate", "targets", "n_targets", "max_depth", "restarts", "tol",
            "rescue_restarts"},
        "synthesize");
    SynthesizeCmdConfig c;
    c.gate = parse_gate_name(get_or<std::string>(j, "gate", "cz"));
    const auto tc = get_or<std::string>(j, "targets", "clifford");
    if (tc == "haar")
        c.targets = synth::TargetClass::Haar;
    else if (tc == "clifford")
        c.targets = synth::TargetClass::Clifford;
    else
        throw ConfigError("synthesize.targets: must be haar|clifford");
    c.n_targets = get_or(j, "n_targets", 50);
    c.max_depth = get_or(j, "max_depth", 6);
    if (c.n_targets < 1 || c.max_depth < 0) throw ConfigError("synthesize: bad sizes");
    c.coverage.synth.restarts = get_or(j, "restarts", 50);
    c.coverage.synth.tol = get_or(j, "tol", 1e-6);
    c.coverage.rescue_restarts = get_or(j, "rescue_restarts", 200);
    return c;
}

VerifyCmdConfig parse_verify(const json& j) {
    check_version(j, "verify");
    check_fields(j, {"version", "device", "schedule_file", "target", "repetitions"}, "verify");
    VerifyCmdConfig c;
    c.device = parse_device(j.at("device"), "verify");
    c.schedule_file = j.at("schedule_file").get<std::string>();
    if (!std::filesystem::exists(c.schedule_file))
        throw ConfigError("verify.schedule_file: file not found: " + c.schedule_file);
    c.target = parse_target_name(j.at("target").get<std::string>());
    c.repetitions = get_or(j, "repetitions", 3);
    if (c.repetitions < 1) throw ConfigError("verify.repetitions: need >= 1");
    return c;
}

}  // namespace config
}  // namespace qkt
