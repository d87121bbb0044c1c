#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkt/crosskerr.hpp"
#include "qkt/gates.hpp"
#include "qkt/randomu.hpp"
#include "support/oracles.hpp"

using namespace qkt;

namespace {
constexpr double kTwoPi = 2.0 * pi;
}

TEST_CASE("rwa hamiltonian structure") {
    DeviceParams dev = DeviceParams::preset("cz-pair");
    DriveParams drv;
    drv.omega_d = dev.omega_c - kTwoPi * 0.3e9;

    SUBCASE("uncoupled undriven: diagonal Duffing spectrum") {
        DeviceParams d0 = dev;
        d0.j_coupling = 0.0;
        const Mat h = rwa_hamiltonian(d0, drv);
        CHECK(is_hermitian(h, 1e-12));
        for (int i = 0; i < d0.d_trunc; ++i)
            for (int j = 0; j < d0.d_trunc; ++j) {
                const int k = i * d0.d_trunc + j;
                const double want = (dev.omega_c - drv.omega_d) * i + 0.5 * dev.eta_c * i * (i - 1) +
                                    (dev.omega_t - drv.omega_d) * j + 0.5 * dev.eta_t * j * (j - 1);
                CHECK(std::abs(h(k, k) - want) < 1e-3);
            }
        // fully diagonal
        CHECK((h - Mat(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("coupling element <10|H|01> = J") {
        const Mat h = rwa_hamiltonian(dev, drv);
        CHECK(std::abs(h(1 * dev.d_trunc + 0, 0 * dev.d_trunc + 1) - dev.j_coupling) < 1e-6);
    }

    SUBCASE("driven uncoupled is block-local") {
        DeviceParams d0 = dev;
        d0.j_coupling = 0.0;
        DriveParams dd = drv;
        dd.amp_c = kTwoPi * 5e6;
        dd.amp_t = kTwoPi * 7e6;
        dd.phi = 0.9;
        const Mat h = rwa_hamiltonian(d0, dd);
        CHECK(is_hermitian(h, 1e-9));
        // no element changes both transmon occupations
        const int d = d0.d_trunc;
        for (int a = 0; a < d * d; ++a)
            for (int b = 0; b < d * d; ++b) {
                if (a / d != b / d && a % d != b % d) CHECK(std::abs(h(a, b)) < 1e-12);
            }
    }

    SUBCASE("d_trunc below 3 rejected") {
        DeviceParams bad = dev;
        bad.d_trunc = 2;
        CHECK_THROWS(rwa_hamiltonian(bad, drv));
    }
}

TEST_CASE("alpha_static: formulas vs exact diagonalization oracle") {
    DeviceParams dev = DeviceParams::preset("cz-pair");
    // equal-anharmonicity device so the oracle isolates formula errors only
    DeviceParams eq = dev;
    eq.eta_c = eq.eta_t = dev.eta_mean();

    const AlphaRates a = alpha_static(eq);
    const auto exact = oracle::alpha_exact_diag(eq, eq.omega_c, 0.0, 0.0, 0.0, 10);
    // agreement at the higher-order-PT level, (J/Delta)^2 ~ 1e-3 relative
    CHECK(std::abs(a.a11 - exact.a11) / std::abs(exact.a11) < 5e-3);
    CHECK(std::abs(a.a12 - exact.a12) / std::abs(exact.a12) < 5e-3);
    CHECK(std::abs(a.a21 - exact.a21) / std::abs(exact.a21) < 5e-3);
    CHECK(std::abs(a.a22 - exact.a22) / std::abs(exact.a22) < 5e-3);

    // J = 0 -> all four rates vanish
    DeviceParams j0 = eq;
    j0.j_coupling = 0.0;
    const AlphaRates z = alpha_static(j0);
    CHECK(z.a11 == 0.0);
    CHECK(z.a12 == 0.0);
    CHECK(z.a21 == 0.0);
    CHECK(z.a22 == 0.0);

    // a22 / a11 = 4 exactly, formula identity
    CHECK(a.a22 / a.a11 == doctest::Approx(4.0).epsilon(1e-12));

    // frozen regression constants for the cz-pair parameters
    // (Delta = 2pi 109 MHz, eta = -2pi 261.57 MHz, J = 2pi 2.7 MHz), in kHz
    CHECK(a.a11 / kTwoPi / 1e3 == doctest::Approx(134.9075).epsilon(1e-4));
    CHECK(a.a12 / kTwoPi / 1e3 == doctest::Approx(-260.4621).epsilon(1e-4));
    CHECK(a.a21 / kTwoPi / 1e3 == doctest::Approx(482.7746).epsilon(1e-4));
    CHECK(a.a22 / kTwoPi / 1e3 == doctest::Approx(539.6299).epsilon(1e-4));

    // second-order RS sums as an independent route for the same combination
    const double delta = eq.delta(), eta = eq.eta_mean(), j = eq.j_coupling;
    auto comb = [&](int i, int jj) {
        return oracle::rs2_energy(i, jj, delta, eta, j) + oracle::rs2_energy(0, 0, delta, eta, j) -
               oracle::rs2_energy(i, 0, delta, eta, j) - oracle::rs2_energy(0, jj, delta, eta, j);
    };
    CHECK(std::abs(a.a11 - comb(1, 1)) / std::abs(a.a11) < 1e-10);
    CHECK(std::abs(a.a12 - comb(1, 2)) / std::abs(a.a12) < 1e-10);
    CHECK(std::abs(a.a21 - comb(2, 1)) / std::abs(a.a21) < 1e-10);
    CHECK(std::abs(a.a22 - comb(2, 2)) / std::abs(a.a22) < 1e-10);
}

TEST_CASE("alpha_static: pole guard") {
    DeviceParams dev = DeviceParams::preset("cz-pair");
    dev.omega_t = dev.omega_c + dev.eta_mean();  // Delta = -eta, on the pole
    CHECK_THROWS_AS(alpha_static(dev), PoleError);
}

TEST_CASE("alpha_driven: formula identities and RS3 oracle") {
    DeviceParams dev = DeviceParams::preset("czdag-pair");
    DeviceParams eq = dev;
    eq.eta_c = eq.eta_t = dev.eta_mean();
    DriveParams drv;
    drv.omega_d = 0.5 * (eq.omega12_c() + eq.omega12_t());
    drv.amp_c = kTwoPi * 4e6;
    drv.amp_t = kTwoPi * 6e6;
    drv.phi = 0.3;

    const AlphaRates a = alpha_driven(eq, drv);

    SUBCASE("phi = pi/2 zeroes every rate (relative to phi = 0)") {
        DriveParams d = drv;
        d.phi = pi / 2.0;
        const AlphaRates z = alpha_driven(eq, d);
        d.phi = 0.0;
        const AlphaRates full = alpha_driven(eq, d);
        CHECK(std::abs(z.a11) < 1e-12 * std::abs(full.a11));
        CHECK(std::abs(z.a12) < 1e-12 * std::abs(full.a12));
        CHECK(std::abs(z.a21) < 1e-12 * std::abs(full.a21));
        CHECK(std::abs(z.a22) < 1e-12 * std::abs(full.a22));
    }

    SUBCASE("phi -> phi + pi flips every sign exactly") {
        DriveParams d = drv;
        d.phi = drv.phi + pi;
        const AlphaRates f = alpha_driven(eq, d);
        CHECK(f.a11 == doctest::Approx(-a.a11).epsilon(1e-12));
        CHECK(f.a12 == doctest::Approx(-a.a12).epsilon(1e-12));
        CHECK(f.a21 == doctest::Approx(-a.a21).epsilon(1e-12));
        CHECK(f.a22 == doctest::Approx(-a.a22).epsilon(1e-12));
    }

    SUBCASE("doubling both amplitudes quadruples the rates exactly") {
        DriveParams d = drv;
        d.amp_c *= 2.0;
        d.amp_t *= 2.0;
        const AlphaRates f = alpha_driven(eq, d);
        CHECK(f.a11 == doctest::Approx(4.0 * a.a11).epsilon(1e-12));
        CHECK(f.a22 == doctest::Approx(4.0 * a.a22).epsilon(1e-12));
    }

    SUBCASE("third-order RS sums reproduce the closed forms") {
        // the oracle isolates the amp_c*amp_t*J trilinear sector numerically
        const auto rs3 = oracle::alpha_rs3_driven(eq.omega_c - drv.omega_d,
                                                  eq.omega_t - drv.omega_d, eq.eta_mean(),
                                                  eq.j_coupling, drv.amp_c, drv.amp_t, drv.phi, 7);
        CHECK(std::abs(a.a11 - rs3.a11) / std::abs(a.a11) < 1e-9);
        CHECK(std::abs(a.a12 - rs3.a12) / std::abs(a.a12) < 1e-9);
        CHECK(std::abs(a.a21 - rs3.a21) / std::abs(a.a21) < 1e-9);
        CHECK(std::abs(a.a22 - rs3.a22) / std::abs(a.a22) < 1e-9);
    }

    SUBCASE("pole proximity rejected") {
        DriveParams d = drv;
        d.omega_d = eq.omega12_c();  // on the control 1->2 transition
        CHECK_THROWS_AS(alpha_driven(eq, d), PoleError);
    }
}

TEST_CASE("propagate: free evolution phases at zero amplitude (J = 0)") {
    DeviceParams dev = DeviceParams::preset("cz-pair");
    dev.j_coupling = 0.0;
    DriveParams drv;
    drv.omega_d = 0.5 * (dev.omega12_c() + dev.omega12_t());
    PulseSchedule sched;
    const double tau = 80e-9;
    sched.segments = {DriveSegment{drv, tau, 20e-9}};

    PropagateOptions opts;
    const auto res = propagate(dev, sched, opts);
    CHECK(res.leakage < 1e-10);
    // diagonal with phases e^{-i E_ij tau}
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double e = (dev.omega_c - drv.omega_d) * i + 0.5 * dev.eta_c * i * (i - 1) +
                             (dev.omega_t - drv.omega_d) * j + 0.5 * dev.eta_t * j * (j - 1);
            const cxd want = std::exp(-im * e * tau);
            CHECK(std::abs(res.unitary(3 * i + j, 3 * i + j) - want) < 1e-7);
        }
}

TEST_CASE("propagate: unitarity and reversibility") {
    DeviceParams dev = DeviceParams::preset("czdag-pair");
    DriveParams drv;
    drv.omega_d = 0.5 * (dev.omega12_c() + dev.omega12_t());
    drv.amp_c = drv.amp_t = kTwoPi * 8e6;
    drv.phi = 0.4;
    PulseSchedule sched;
    sched.segments = {DriveSegment{drv, 300e-9, 20e-9}};

    PropagateOptions opts;
    const auto res = propagate(dev, sched, opts);
    // closed-system propagator unitary on the full truncated space; the
    // projected 9x9 block only loses the (physical) leakage mass
    const int full = dev.d_trunc * dev.d_trunc;
    CHECK((res.unitary_full.adjoint() * res.unitary_full - Mat::Identity(full, full))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK((res.unitary.adjoint() * res.unitary - Mat::Identity(9, 9)).cwiseAbs().maxCoeff() <
          10 * std::max(res.leakage, 1e-9));
    CHECK(res.richardson_error < 1e-6);

    // inverse via the conjugation identity: for a time-symmetric segment the
    // propagator with phi -> -phi is W with conj(W) = U^dag
    DriveParams back = drv;
    back.phi = -drv.phi;
    PulseSchedule rev;
    rev.segments = {DriveSegment{back, 300e-9, 20e-9}};
    const auto res2 = propagate(dev, rev, opts);
    CHECK((res2.unitary_full.conjugate() * res.unitary_full - Mat::Identity(full, full))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
}

TEST_CASE("extract_entangling_phases") {
    SUBCASE("CZ gives the 2pi/3 pattern") {
        const auto ph = extract_entangling_phases(native_gate_matrix(GateKind::CZ));
        CHECK(ph.a11 == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-12));
        CHECK(ph.a12 == doctest::Approx(-2.0 * pi / 3.0).epsilon(1e-12));
        CHECK(ph.a21 == doctest::Approx(-2.0 * pi / 3.0).epsilon(1e-12));
        CHECK(ph.a22 == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-12));
    }
    SUBCASE("local Z phases cancel exactly") {
        const Mat u = kron(z01_matrix(0.77), z12_matrix(-1.3));
        const auto ph = extract_entangling_phases(u);
        CHECK(std::abs(ph.a11) < 1e-14);
        CHECK(std::abs(ph.a12) < 1e-14);
        CHECK(std::abs(ph.a21) < 1e-14);
        CHECK(std::abs(ph.a22) < 1e-14);
    }
    SUBCASE("diagonal generator: phases are -alpha tau and Z-invariant") {
        const double a11 = kTwoPi * 70e3, a12 = kTwoPi * -50e3, a21 = kTwoPi * 20e3,
                     a22 = kTwoPi * 120e3;
        const double tau = 1e-6;
        Mat u = Mat::Identity(9, 9);
        u(4, 4) = std::exp(-im * a11 * tau);
        u(5, 5) = std::exp(-im * a12 * tau);
        u(7, 7) = std::exp(-im * a21 * tau);
        u(8, 8) = std::exp(-im * a22 * tau);
        const auto ph = extract_entangling_phases(u);
        CHECK(ph.a11 == doctest::Approx(wrap_angle(-a11 * tau)).epsilon(1e-10));
        CHECK(ph.a12 == doctest::Approx(wrap_angle(-a12 * tau)).epsilon(1e-10));

        // invariant under left/right local Z multiplication
        const Mat z = kron(z01_matrix(0.4) * z12_matrix(0.9), z01_matrix(-0.2) * z12_matrix(1.7));
        const auto ph2 = extract_entangling_phases(z * u * z.adjoint());
        CHECK(ph2.a11 == doctest::Approx(ph.a11).epsilon(1e-10));
        CHECK(ph2.a12 == doctest::Approx(ph.a12).epsilon(1e-10));
        CHECK(ph2.a21 == doctest::Approx(ph.a21).epsilon(1e-10));
        CHECK(ph2.a22 == doctest::Approx(ph.a22).epsilon(1e-10));
    }
    SUBCASE("off-diagonal leakage rejected") {
        Rng rng(4);
        CHECK_THROWS(extract_entangling_phases(haar_su9(rng)));
    }
}

TEST_CASE("weak-drive slopes vs perturbative alphas within 20%") {
    DeviceParams dev = DeviceParams::preset("czdag-pair");
    DriveParams drv;
    drv.omega_d = 0.5 * (dev.omega12_c() + dev.omega12_t());
    drv.amp_c = drv.amp_t = kTwoPi * 2.5e6;
    drv.phi = 0.0;

    PropagateOptions opts;
    opts.richardson_check = false;
    const auto fit =
        measure_alpha_propagated(dev, drv, {0.4e-6, 0.8e-6, 1.2e-6, 1.6e-6}, 20e-9, opts);
    const AlphaRates pert = alpha_static(dev) + alpha_driven(dev, drv);
    CHECK(std::abs(fit.rates.a11 - pert.a11) / std::abs(fit.rates.a11) < 0.2);
    CHECK(std::abs(fit.rates.a12 - pert.a12) / std::abs(fit.rates.a12) < 0.2);
    CHECK(std::abs(fit.rates.a21 - pert.a21) / std::abs(fit.rates.a21) < 0.2);
    CHECK(std::abs(fit.rates.a22 - pert.a22) / std::abs(fit.rates.a22) < 0.2);
}

TEST_CASE("echo symmetry: 11/22 and 12/21 phases pair up") {
    DeviceParams dev = DeviceParams::preset("czdag-pair");
    DriveParams drv;
    drv.omega_d = 0.5 * (dev.omega12_c() + dev.omega12_t()) + kTwoPi * 12e6;
    drv.amp_c = drv.amp_t = kTwoPi * 3e6;
    drv.phi = 0.0;
    PulseSchedule sched = PulseSchedule::echoed(drv, 400e-9, 20e-9);
    PropagateOptions opts;
    opts.richardson_check = false;
    const auto res = propagate(dev, sched, opts);
    const auto ph = extract_entangling_phases(res.unitary, 5e-2);
    CHECK(std::abs(wrap_angle(ph.a11 - ph.a22)) < 1e-4);
    CHECK(std::abs(wrap_angle(ph.a12 - ph.a21)) < 1e-4);
}

TEST_CASE("schedule json round trip") {
    DriveParams drv;
    drv.omega_d = kTwoPi * 5.17e9;
    drv.amp_c = drv.amp_t = kTwoPi * 9e6;
    drv.phi = pi;
    PulseSchedule s = PulseSchedule::echoed(drv, 290e-9, 20e-9);
    s.virtual_z = {0.1, -0.3, 2.2, 0.0};
    const auto back = PulseSchedule::from_json(s.to_json());
    CHECK(back.segments.size() == 4);
    CHECK(back.total_time() == doctest::Approx(s.total_time()));
    for (int i = 0; i < 4; ++i) CHECK(back.virtual_z[i] == doctest::Approx(s.virtual_z[i]));
    CHECK_THROWS(PulseSchedule::from_json(R"({"segments":[{"type":"drive","omega_d":1e9,
        "amp_c":1e6,"amp_t":1e6,"phi":0,"total":1e-8,"ramp":9e-9}]})"));
}

TEST_CASE("lindblad path: decoherence-free limit matches the unitary path") {
    DeviceParams dev = DeviceParams::preset("cz-pair");
    // strip coherence times: no collapse operators, superop = unitary conj
    dev.coh_c = Coherence{};
    dev.coh_t = Coherence{};
    DriveParams drv;
    drv.omega_d = 0.5 * (dev.omega12_c() + dev.omega12_t());
    drv.amp_c = drv.amp_t = kTwoPi * 5e6;
    PulseSchedule sched;
    sched.segments = {DriveSegment{drv, 120e-9, 20e-9}};

    PropagateOptions u_opts;
    u_opts.richardson_check = false;
    const auto ures = propagate(dev, sched, u_opts);
    PropagateOptions l_opts = u_opts;
    l_opts.decoherence = true;
    const auto lres = propagate(dev, sched, l_opts);
    REQUIRE(lres.is_channel);

    Mat rho0 = Mat::Zero(9, 9);
    rho0(0, 0) = 0.5;
    rho0(4, 4) = 0.5;
    rho0(0, 4) = rho0(4, 0) = 0.3;
    const Mat a = lres.channel().apply(rho0);
    const Mat b = ures.unitary * rho0 * ures.unitary.adjoint();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("lindblad path: T1 relaxation decays |11> population") {
    DeviceParams dev = DeviceParams::preset("cz-pair");
    DriveParams drv;
    drv.omega_d = 0.5 * (dev.omega12_c() + dev.omega12_t());
    PulseSchedule sched;
    sched.segments = {DriveSegment{drv, 4e-6, 20e-9}};  // no drive, just decay
    PropagateOptions opts;
    opts.decoherence = true;
    opts.richardson_check = false;
    const auto res = propagate(dev, sched, opts);

    Mat rho0 = Mat::Zero(9, 9);
    rho0(4, 4) = 1.0;  // |11>
    const Mat out = res.channel().apply(rho0);
    const double p11 = std::real(out(4, 4));
    const double rate = 1.0 / *dev.coh_c.t1_01 + 1.0 / *dev.coh_t.t1_01;
    const double want = std::exp(-rate * 4e-6);
    CHECK(p11 == doctest::Approx(want).epsilon(0.02));
    CHECK(std::abs(out.trace().real() - 1.0) < 1e-6);
}
