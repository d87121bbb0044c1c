#include "qkt/device.hpp"

#include <stdexcept>

#include <json.hpp>

namespace qkt {

using nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * pi;

ordered_json coh_to_json(const Coherence& c) {
    ordered_json j = ordered_json::object();
    if (c.t1_01) j["t1_01"] = *c.t1_01;
    if (c.t1_12) j["t1_12"] = *c.t1_12;
    if (c.t2_01) j["t2_01"] = *c.t2_01;
    if (c.t2_12) j["t2_12"] = *c.t2_12;
    return j;
}

Coherence coh_from_json(const ordered_json& j) {
    Coherence c;
    if (j.contains("t1_01")) c.t1_01 = j.at("t1_01").get<double>();
    if (j.contains("t1_12")) c.t1_12 = j.at("t1_12").get<double>();
    if (j.contains("t2_01")) c.t2_01 = j.at("t2_01").get<double>();
    if (j.contains("t2_12")) c.t2_12 = j.at("t2_12").get<double>();
    return c;
}

}  // namespace

std::string DeviceParams::to_json() const {
    ordered_json j;
    j["version"] = 1;
    j["name"] = name;
    // external interface carries Hz and seconds
    j["omega_c"] = omega_c / kTwoPi;
    j["omega_t"] = omega_t / kTwoPi;
    j["eta_c"] = eta_c / kTwoPi;
    j["eta_t"] = eta_t / kTwoPi;
    j["j_coupling"] = j_coupling / kTwoPi;
    j["d_trunc"] = d_trunc;
    j["coherence_c"] = coh_to_json(coh_c);
    j["coherence_t"] = coh_to_json(coh_t);
    return j.dump(2);
}

DeviceParams DeviceParams::from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    DeviceParams d;
    d.name = j.value("name", "");
    d.omega_c = j.at("omega_c").get<double>() * kTwoPi;
    d.omega_t = j.at("omega_t").get<double>() * kTwoPi;
    d.eta_c = j.at("eta_c").get<double>() * kTwoPi;
    d.eta_t = j.at("eta_t").get<double>() * kTwoPi;
    d.j_coupling = j.at("j_coupling").get<double>() * kTwoPi;
    d.d_trunc = j.value("d_trunc", 4);
    if (d.d_trunc < 3) throw std::invalid_argument("device: d_trunc must be >= 3");
    if (j.contains("coherence_c")) d.coh_c = coh_from_json(j.at("coherence_c"));
    if (j.contains("coherence_t")) d.coh_t = coh_from_json(j.at("coherence_t"));
    return d;
}

DeviceParams DeviceParams::preset(const std::string& name) {
    DeviceParams d;
    d.name = name;
    d.d_trunc = 4;
    if (name == "cz-pair") {
        // transmon pair hosting the CZ gate (Q3/Q4)
        d.omega_c = kTwoPi * 5.436e9;
        d.omega_t = kTwoPi * 5.327e9;
        d.eta_c = kTwoPi * -260.20e6;
        d.eta_t = kTwoPi * -262.94e6;
        d.j_coupling = kTwoPi * 2.7e6;
        d.coh_c = Coherence{125e-6, 63e-6, 114e-6, 17e-6};
        d.coh_t = Coherence{78e-6, 47e-6, 99e-6, 17e-6};
    } else if (name == "czdag-pair") {
        // transmon pair hosting the CZdag gate (Q5/Q6); the coupling was not
        // reported for this pair, the cz-pair estimate stands in
        d.omega_c = kTwoPi * 5.362e9;
        d.omega_t = kTwoPi * 5.523e9;
        d.eta_c = kTwoPi * -275.0e6;
        d.eta_t = kTwoPi * -271.35e6;
        d.j_coupling = kTwoPi * 2.7e6;
        d.coh_c = Coherence{45e-6, 33e-6, 36e-6, 10e-6};
        d.coh_t = Coherence{58e-6, 28e-6, 76e-6, 18e-6};
    } else {
        throw std::invalid_argument("unknown device preset: " + name);
    }
    return d;
}

}  // namespace qkt
