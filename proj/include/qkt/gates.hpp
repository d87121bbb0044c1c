#pragma once

#include <string>
#include <vector>

#include "qkt/linalg.hpp"

namespace qkt {

enum class GateKind {
    X01Half, X12Half, Y01Half, Y12Half,
    X01Pi, X12Pi, Y01Pi, Y12Pi,
    Z01, Z12,              // params: [phi]
    H3, H3Dag,
    CZ, CZDag, CSUM, Cex, Cinc,
    SU3,                   // params: 8 Gell-Mann angles, U = exp(-i sum_k p_k lambda_k)
    CustomUnitary,         // params: row-major re/im pairs
    DepolarizeChannel,     // params: [p]; depolarizes the joint space of its targets
};

const char* gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

bool gate_kind_is_channel(GateKind k);
/// fixed-arity kinds: 1 or 2 qutrits; CustomUnitary/Depolarize infer from targets
int gate_kind_arity(GateKind k);

/// matrix of a fixed (parameter-free) single- or two-qutrit gate
Mat native_gate_matrix(GateKind kind);

/// parameterized single-qutrit matrices
Mat z01_matrix(double phi);  // diag(e^{-i phi}, 1, 1)
Mat z12_matrix(double phi);  // diag(1, 1, e^{i phi})
Mat su3_matrix(const std::vector<double>& theta8);

/// subspace-entangling two-qutrit gates, control state |2> by default:
/// Cinc applies |j> -> |j+1 mod 3>, Cex exchanges |0>,|1> on the target
Mat cinc_matrix(int control_state = 2);
Mat cex_matrix(int control_state = 2);

/// One gate application inside a circuit.
struct Gate {
    GateKind kind;
    std::vector<int> targets;
    std::vector<double> params;

    bool is_channel() const { return gate_kind_is_channel(kind); }
    /// unitary matrix on the gate's own qutrits (throws for channels)
    Mat matrix() const;

    static Gate fixed(GateKind k, std::vector<int> t) { return Gate{k, std::move(t), {}}; }
    static Gate z01(int q, double phi) { return Gate{GateKind::Z01, {q}, {phi}}; }
    static Gate z12(int q, double phi) { return Gate{GateKind::Z12, {q}, {phi}}; }
    static Gate su3(int q, std::vector<double> theta8);
    static Gate custom(std::vector<int> t, const Mat& u);
    static Gate depolarize(std::vector<int> t, double p) {
        return Gate{GateKind::DepolarizeChannel, std::move(t), {p}};
    }
};

}  // namespace qkt
