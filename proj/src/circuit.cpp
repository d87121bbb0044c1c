#include "qkt/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace qkt {

using nlohmann::ordered_json;

Circuit& Circuit::add(Gate g) {
    for (int t : g.targets)
        if (t < 0 || t >= n_qutrits) throw std::out_of_range("gate target out of range");
    const int arity = gate_kind_arity(g.kind);
    if (arity != 0 && static_cast<int>(g.targets.size()) != arity)
        throw std::invalid_argument("gate target count does not match kind");
    ops.push_back(std::move(g));
    return *this;
}

bool Circuit::has_channel() const {
    for (const auto& g : ops)
        if (g.is_channel()) return true;
    return false;
}

Mat embed(const Mat& op, const std::vector<int>& targets, int n_qutrits) {
    int dim = 1;
    for (int i = 0; i < n_qutrits; ++i) dim *= 3;
    Mat out = Mat::Zero(dim, dim);
    const int k = static_cast<int>(targets.size());
    // strides of each qutrit in the packed index (qutrit 0 most significant)
    std::vector<int> stride(n_qutrits, 1);
    for (int q = n_qutrits - 2; q >= 0; --q) stride[q] = stride[q + 1] * 3;

    std::vector<bool> on(n_qutrits, false);
    for (int t : targets) on[t] = true;
    std::vector<int> rest;
    for (int q = 0; q < n_qutrits; ++q)
        if (!on[q]) rest.push_back(q);

    const int sub = static_cast<int>(op.rows());
    int rest_count = 1;
    for (std::size_t i = 0; i < rest.size(); ++i) rest_count *= 3;

    for (int r = 0; r < rest_count; ++r) {
        // base index carried by the untouched qutrits
        int base = 0, rr = r;
        for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
            base += (rr % 3) * stride[*it];
            rr /= 3;
        }
        for (int a = 0; a < sub; ++a) {
            int ia = base, aa = a;
            for (int t = k - 1; t >= 0; --t) {
                ia += (aa % 3) * stride[targets[t]];
                aa /= 3;
            }
            for (int b = 0; b < sub; ++b) {
                if (op(a, b) == cxd(0, 0)) continue;
                int ib = base, bb = b;
                for (int t = k - 1; t >= 0; --t) {
                    ib += (bb % 3) * stride[targets[t]];
                    bb /= 3;
                }
                out(ia, ib) = op(a, b);
            }
        }
    }
    return out;
}

Mat Circuit::unitary() const {
    int dim = 1;
    for (int i = 0; i < n_qutrits; ++i) dim *= 3;
    Mat u = Mat::Identity(dim, dim);
    for (const auto& g : ops) {
        if (g.is_channel()) throw std::invalid_argument("Circuit::unitary: circuit has channels");
        u = embed(g.matrix(), g.targets, n_qutrits) * u;
    }
    return u;
}

namespace {

/// Angles that are rational multiples of pi round-trip as {num, den};
/// anything else round-trips as the IEEE double itself.
ordered_json encode_angle(double v) {
    for (int den = 1; den <= 360; ++den) {
        const double scaled = v * den / pi;
        const double num = std::nearbyint(scaled);
        if (std::abs(num) <= 1e6 && num != 0.0 && pi * num / den == v) {
            ordered_json j;
            j["pi_num"] = static_cast<long long>(num);
            j["pi_den"] = den;
            return j;
        }
    }
    if (v == 0.0) return ordered_json{{"pi_num", 0}, {"pi_den", 1}};
    return ordered_json(v);
}

double decode_angle(const ordered_json& j) {
    if (j.is_object()) return pi * j.at("pi_num").get<double>() / j.at("pi_den").get<double>();
    return j.get<double>();
}

bool kind_has_angles(GateKind k) {
    return k == GateKind::Z01 || k == GateKind::Z12 || k == GateKind::SU3;
}

}  // namespace

std::string Circuit::to_json() const {
    ordered_json j;
    j["version"] = 1;
    j["n_qutrits"] = n_qutrits;
    j["seed"] = seed;
    j["label"] = label;
    j["ops"] = ordered_json::array();
    for (const auto& g : ops) {
        ordered_json op;
        op["kind"] = gate_kind_name(g.kind);
        op["targets"] = g.targets;
        if (!g.params.empty()) {
            ordered_json params = ordered_json::array();
            for (double p : g.params)
                params.push_back(kind_has_angles(g.kind) ? encode_angle(p) : ordered_json(p));
            op["params"] = std::move(params);
        }
        j["ops"].push_back(std::move(op));
    }
    return j.dump(2);
}

Circuit Circuit::from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    Circuit c(j.at("n_qutrits").get<int>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.label = j.value("label", "");
    for (const auto& op : j.at("ops")) {
        Gate g;
        g.kind = gate_kind_from_name(op.at("kind").get<std::string>());
        g.targets = op.at("targets").get<std::vector<int>>();
        if (op.contains("params"))
            for (const auto& p : op.at("params")) g.params.push_back(decode_angle(p));
        c.add(std::move(g));
    }
    return c;
}

}  // namespace qkt
