#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkt/config.hpp"
#include "qkt/randomu.hpp"
#include "qkt/xeb.hpp"

using namespace qkt;

TEST_CASE("xeb_circuit basics") {
    Rng rng(1);
    const auto c0 = xeb::xeb_circuit(GateKind::CZDag, 0, rng);
    CHECK(c0.ideal(0) == doctest::Approx(1.0));  // point mass at "00"
    CHECK(c0.circuit.ops.empty());

    const auto c5 = xeb::xeb_circuit(GateKind::CZDag, 5, rng);
    CHECK(c5.circuit.ops.size() == 15);
    CHECK(c5.ideal.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c5.ideal.minCoeff() >= 0.0);
}

TEST_CASE("linear cross entropy and f_xeb formulas") {
    const RVec u = RVec::Constant(9, 1.0 / 9.0);
    CHECK(xeb::linear_cross_entropy(u, u) == doctest::Approx(1.0 / 9.0));

    Rng rng(2);
    RVec p(9);
    for (int i = 0; i < 9; ++i) p(i) = rng.uniform();
    p /= p.sum();
    CHECK(xeb::linear_cross_entropy(p, u) == doctest::Approx(1.0 / 9.0));

    RVec point = RVec::Zero(9);
    point(4) = 1.0;
    CHECK(xeb::linear_cross_entropy(point, point) == doctest::Approx(1.0));

    CHECK(xeb::f_xeb(p, p) == doctest::Approx(1.0));
    CHECK(xeb::f_xeb(p, u) == doctest::Approx(0.0).epsilon(1e-12));
    // affine in the measured distribution: mixing toward uniform scales f
    const double lam = 0.8;
    const RVec q = lam * p + (1.0 - lam) * u;
    CHECK(xeb::f_xeb(p, q) == doctest::Approx(lam).epsilon(1e-10));
    // general affinity
    RVec q2(9);
    for (int i = 0; i < 9; ++i) q2(i) = rng.uniform();
    q2 /= q2.sum();
    const double mix = 0.35;
    CHECK(xeb::f_xeb(p, (mix * q + (1 - mix) * q2).eval()) ==
          doctest::Approx(mix * xeb::f_xeb(p, q) + (1 - mix) * xeb::f_xeb(p, q2)).epsilon(1e-10));
    // degenerate denominator rejected
    CHECK_THROWS(xeb::f_xeb(u, p));
}

TEST_CASE("speckle purity: porter-thomas calibration and degenerate cases") {
    Rng rng(3);
    // exact Porter-Thomas draws: p = 1 - u^{1/8} has density 8(1-p)^7
    std::vector<double> pt;
    for (int i = 0; i < 20000; ++i) pt.push_back(1.0 - std::pow(rng.uniform(), 1.0 / 8.0));
    CHECK(xeb::speckle_purity(pt) == doctest::Approx(1.0).epsilon(0.05));

    std::vector<double> flat(500, 1.0 / 9.0);
    CHECK(xeb::speckle_purity(flat) == doctest::Approx(0.0));

    CHECK_THROWS(xeb::speckle_purity(std::vector<double>(5, 0.1)));
}

TEST_CASE("speckle purity against the exact state purity oracle" * doctest::timeout(900)) {
    // pure depolarization: scaled purity of the exact output state equals the
    // speckle estimate within sampling error
    const double p = 0.9;
    Backend noisy;
    noisy.noise.twoq_depol_p = p;
    Rng rng(4);
    const int depth = 6, n_circ = 60;
    std::vector<std::vector<double>> per_trit(9);
    double exact_gamma = 0.0;
    for (int c = 0; c < n_circ; ++c) {
        Rng crng = rng.split(c);
        const auto xc = xeb::xeb_circuit(GateKind::CZDag, depth, crng);
        const RVec probs = noisy.probabilities(xc.circuit);
        for (int o = 0; o < 9; ++o) per_trit[o].push_back(probs(o));
        const Mat rho = noisy.final_state(xc.circuit);
        const double tr2 = std::real((rho * rho).trace());
        exact_gamma += (9.0 * tr2 - 1.0) / 8.0;  // purity on the (0,1) scale
    }
    exact_gamma /= n_circ;
    double speckle = 0.0;
    for (int o = 0; o < 9; ++o) speckle += xeb::speckle_purity(per_trit[o]);
    speckle /= 9.0;
    CHECK(speckle == doctest::Approx(exact_gamma).epsilon(0.25));
    CHECK(exact_gamma == doctest::Approx(std::pow(p, 2 * depth)).epsilon(0.01));
}

TEST_CASE("run_xeb: noiseless gives unit fidelity" * doctest::timeout(900)) {
    xeb::XEBConfig cfg;
    cfg.depths = {2, 5, 10};
    cfg.n_random = 15;
    cfg.shots = 2048;
    Backend ideal;
    Rng rng(5);
    const auto res = xeb::run_xeb(cfg, ideal, rng);
    for (double f : res.fidelity_per_depth) CHECK(std::abs(f - 1.0) < 0.05);
    CHECK(std::abs(res.cycle_fidelity - 1.0) < 0.02);
    // pure states at depth >= 5: speckle within 0.05 of 1 (shots corrected)
    CHECK(std::abs(res.speckle_per_depth[1].purity - 1.0) < 0.3);
}

TEST_CASE("run_xeb: depolarizing oracle recovers p" * doctest::timeout(900)) {
    const double p = 0.933;
    xeb::XEBConfig cfg;
    cfg.depths = {2, 5, 10, 15};
    cfg.n_random = 20;
    cfg.shots = 4096;
    Backend noisy;
    noisy.noise.twoq_depol_p = p;
    Rng rng(6);
    const auto res = xeb::run_xeb(cfg, noisy, rng);
    CHECK(std::abs(res.cycle_fidelity - p) < 0.012);
}

TEST_CASE("run_xeb: coherent noise lowers fidelity but keeps purity" * doctest::timeout(900)) {
    xeb::XEBConfig cfg;
    cfg.depths = {2, 5, 10};
    cfg.n_random = 20;
    cfg.shots = 4096;
    Backend coherent;
    json noise_cfg{{"twoq_overrotation", 0.30}};
    coherent.noise = config::parse_noise(noise_cfg, "test");
    Rng rng(7);
    const auto res = xeb::run_xeb(cfg, coherent, rng);
    CHECK(res.cycle_fidelity < 0.97);
    CHECK(res.purity_limit > 0.99);  // unitary errors preserve purity
}

TEST_CASE("porter-thomas test: haar states pass, depolarized fail") {
    Rng rng(8);
    std::vector<double> probs;
    // 1000 Haar-random two-qutrit pure states, one fixed tritstring
    for (int t = 0; t < 1000; ++t) {
        const Mat u = haar_su9(rng);
        probs.push_back(std::norm(u(4, 0)));
    }
    const auto r = xeb::porter_thomas_test(probs);
    CHECK(r.pass);

    std::vector<double> flat(1000);
    for (auto& v : flat) v = 1.0 / 9.0 + 1e-4 * rng.normal();
    const auto r2 = xeb::porter_thomas_test(flat);
    CHECK(!r2.pass);
    CHECK(r2.uniform_limit);
}

TEST_CASE("cross-protocol consistency: XEB and CB agree under depolarizing" *
          doctest::timeout(1800)) {
    const double p = 0.95;
    Backend noisy;
    noisy.noise.twoq_depol_p = p;

    xeb::XEBConfig xcfg;
    xcfg.depths = {2, 5, 10};
    xcfg.n_random = 16;
    xcfg.shots = 2048;
    Rng r1(9);
    const auto xres = xeb::run_xeb(xcfg, noisy, r1);

    cb::CBConfig ccfg;
    Circuit cyc(2);
    cyc.add(Gate::fixed(GateKind::CZDag, {0, 1}));
    ccfg.cycle = cyc;
    ccfg.depths = {0, 2, 4};
    ccfg.channels = cb::channel_subset(20, 2);
    ccfg.n_randomizations = 12;
    ccfg.shots = 1024;
    Rng r2(10);
    const auto cres = cb::run_cb(ccfg, noisy, r2);

    // the CB composite dilutes p by the identity channel share
    const double cb_p =
        (cres.composite_fidelity * (20 + 1) - 1.0) / 20.0;  // undo the mean with identity
    CHECK(std::abs(xres.cycle_fidelity - cb_p) < 0.02);
}
