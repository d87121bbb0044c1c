#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkt/circuit.hpp"
#include "qkt/decompose.hpp"
#include "qkt/randomu.hpp"

using namespace qkt;

TEST_CASE("native gate matrices") {
    // all fixed kinds unitary to 1e-12
    for (GateKind k : {GateKind::X01Half, GateKind::X12Half, GateKind::Y01Half, GateKind::Y12Half,
                       GateKind::X01Pi, GateKind::X12Pi, GateKind::Y01Pi, GateKind::Y12Pi,
                       GateKind::H3, GateKind::H3Dag, GateKind::CZ, GateKind::CZDag,
                       GateKind::CSUM, GateKind::Cex, GateKind::Cinc})
        CHECK(is_unitary(native_gate_matrix(k), 1e-12));

    // half pulses act as the displayed 2x2 rotation block, identity elsewhere
    const Mat x01 = native_gate_matrix(GateKind::X01Half);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(x01(0, 0) - r) < 1e-15);
    CHECK(std::abs(x01(0, 1) - cxd(0, -r)) < 1e-15);
    CHECK(std::abs(x01(1, 0) - cxd(0, -r)) < 1e-15);
    CHECK(std::abs(x01(2, 2) - 1.0) < 1e-15);
    const Mat x12 = native_gate_matrix(GateKind::X12Half);
    CHECK(std::abs(x12(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(x12(1, 2) - cxd(0, -r)) < 1e-15);

    // Z gates: diag(e^{-i phi},1,1) and diag(1,1,e^{i phi})
    const double phi = 0.731;
    CHECK(std::abs(z01_matrix(phi)(0, 0) - std::exp(-im * phi)) < 1e-15);
    CHECK(std::abs(z12_matrix(phi)(2, 2) - std::exp(im * phi)) < 1e-15);

    // H3 = (1/sqrt 3) [omega^{jk}]
    const Mat h3 = native_gate_matrix(GateKind::H3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(h3(j, k) - std::pow(omega3, (j * k) % 3) / std::sqrt(3.0)) < 1e-14);

    // CZ entry at |11> is omega; CZ CZ^dag = I; CZ^3 = I (omega^{3ij} = 1)
    const Mat cz = native_gate_matrix(GateKind::CZ);
    CHECK(std::abs(cz(4, 4) - omega3) < 1e-15);
    CHECK((cz * cz.adjoint() - Mat::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(((cz * cz * cz) - Mat::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-14);

    // diagonal gates commute
    const Mat czd = native_gate_matrix(GateKind::CZDag);
    CHECK((cz * czd - czd * cz).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("subspace controlled gates") {
    const Mat cinc = native_gate_matrix(GateKind::Cinc);
    const Mat cex = native_gate_matrix(GateKind::Cex);
    CHECK(is_unitary(cinc, 1e-14));
    CHECK(is_unitary(cex, 1e-14));

    // Cinc |20> = |21>
    Vec in = Vec::Zero(9);
    in(6) = 1.0;  // |20>
    CHECK(std::abs((cinc * in)(7) - 1.0) < 1e-15);
    // Cex |00> = |00> (control not satisfied)
    in.setZero();
    in(0) = 1.0;
    CHECK(std::abs((cex * in)(0) - 1.0) < 1e-15);
    // Cinc^3 restricted to control |2> is the identity
    CHECK(((cinc * cinc * cinc) - Mat::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-14);
    // Cex |21> = |20>
    in.setZero();
    in(7) = 1.0;
    CHECK(std::abs((cex * in)(6) - 1.0) < 1e-15);
}

TEST_CASE("su3 parameterization: zero params -> identity, unitary everywhere") {
    CHECK((su3_matrix(std::vector<double>(8, 0.0)) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-15);
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> th(8);
        for (auto& v : th) v = rng.uniform(-3.0, 3.0);
        CHECK(is_unitary(su3_matrix(th), 1e-12));
    }
}

TEST_CASE("circuit json round trip is bit exact") {
    Circuit c(2);
    c.seed = 123456789;
    c.label = "roundtrip";
    c.add(Gate::fixed(GateKind::H3, {0}));
    c.add(Gate::z01(0, pi * 2.0 / 3.0));          // rational multiple of pi
    c.add(Gate::z12(1, 0.12345678901234567));     // irrational angle
    c.add(Gate::su3(1, {0.1, -0.2, 0.3, pi / 4.0, 0.0, 1.5, -2.5, 0.25}));
    c.add(Gate::fixed(GateKind::CZ, {0, 1}));
    Rng rng(9);
    c.add(Gate::custom({0}, haar_su3(rng)));
    c.add(Gate::depolarize({0, 1}, 0.93));

    const std::string text = c.to_json();
    const Circuit back = Circuit::from_json(text);
    REQUIRE(back.ops.size() == c.ops.size());
    CHECK(back.seed == c.seed);
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        CHECK(back.ops[i].kind == c.ops[i].kind);
        CHECK(back.ops[i].targets == c.ops[i].targets);
        REQUIRE(back.ops[i].params.size() == c.ops[i].params.size());
        for (std::size_t p = 0; p < c.ops[i].params.size(); ++p)
            CHECK(back.ops[i].params[p] == c.ops[i].params[p]);  // bit exact
    }
    // and the serialization itself is stable
    CHECK(back.to_json() == text);
}

TEST_CASE("circuit validation") {
    Circuit c(2);
    CHECK_THROWS(c.add(Gate::fixed(GateKind::H3, {2})));           // target out of range
    CHECK_THROWS(c.add(Gate::fixed(GateKind::CZ, {0})));           // arity mismatch
    c.add(Gate::depolarize({0, 1}, 0.5));
    CHECK(c.has_channel());
    CHECK_THROWS(c.unitary());
}

TEST_CASE("decompose_su3: trivial cases") {
    // identity -> empty list (or zero-angle Z gates)
    const auto gates_id = decompose_su3(Mat::Identity(3, 3));
    CHECK(pulse_count(gates_id) == 0);
    CHECK(phase_aligned_dist(gate_list_unitary(gates_id), Mat::Identity(3, 3)) < 1e-12);

    // native element -> single-gate list
    const auto gates_x = decompose_su3(native_gate_matrix(GateKind::X01Half));
    CHECK(gates_x.size() == 1);
    CHECK(gates_x[0].kind == GateKind::X01Half);

    // diagonal -> virtual Z gates only
    const Mat d = z01_matrix(0.7) * z12_matrix(-1.1);
    const auto gates_d = decompose_su3(d);
    CHECK(pulse_count(gates_d) == 0);
    CHECK(phase_aligned_dist(gate_list_unitary(gates_d), d) < 1e-12);
}

TEST_CASE("decompose_su3: 1000 Haar samples reconstruct within 1e-9") {
    Rng rng(2024);
    double worst = 0.0;
    int worst_pulses = 0;
    for (int t = 0; t < 1000; ++t) {
        const Mat u = haar_su3(rng);
        const auto gates = decompose_su3(u);
        worst_pulses = std::max(worst_pulses, pulse_count(gates));
        worst = std::max(worst, phase_aligned_dist(gate_list_unitary(gates), u));
    }
    CHECK(worst < 1e-9);
    CHECK(worst_pulses <= 6);  // at most six non-virtual pulses
}

TEST_CASE("embed places local operators correctly") {
    Rng rng(8);
    const Mat a = haar_su3(rng), b = haar_su3(rng);
    // embedding on (0) and (1) of a 2-qutrit register reproduces kron
    CHECK((embed(a, {0}, 2) - kron(a, Mat::Identity(3, 3))).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((embed(b, {1}, 2) - kron(Mat::Identity(3, 3), b)).cwiseAbs().maxCoeff() < 1e-14);
    // two-qutrit operator on reversed targets = swap-conjugated
    const Mat ab = kron(a, b);
    const Mat emb = embed(ab, {1, 0}, 2);
    CHECK((emb - kron(b, a)).cwiseAbs().maxCoeff() < 1e-13);
}
