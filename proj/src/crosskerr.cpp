#include "qkt/crosskerr.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <map>
#include <stdexcept>

#include <json.hpp>

#include "qkt/gates.hpp"
#include "qkt/stats.hpp"

namespace qkt {

using nlohmann::ordered_json;

namespace {

constexpr double kPoleGuard = 2.0 * pi * 1e3;  // rad/s

Mat lowering(int d) {
    Mat a = Mat::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

Mat duffing(int d, double detuning, double eta) {
    Mat h = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) h(k, k) = detuning * k + 0.5 * eta * k * (k - 1);
    return h;
}

void guard_poles(std::initializer_list<double> denominators) {
    for (double v : denominators)
        if (std::abs(v) < kPoleGuard)
            throw PoleError("perturbative formula within 1 kHz of a pole");
}

}  // namespace

Mat rwa_hamiltonian(const DeviceParams& dev, const DriveParams& drv) {
    const int d = dev.d_trunc;
    if (d < 3) throw std::invalid_argument("rwa_hamiltonian: d_trunc must be >= 3");
    const Mat a = lowering(d), id = Mat::Identity(d, d);
    const Mat adag = a.adjoint();

    Mat h = kron(duffing(d, dev.omega_c - drv.omega_d, dev.eta_c), id) +
            kron(id, duffing(d, dev.omega_t - drv.omega_d, dev.eta_t));
    h += dev.j_coupling * (kron(adag, a) + kron(a, adag));
    // relative drive phase carried by the target tone
    h += drv.amp_c * (kron(a, id) + kron(adag, id));
    h += drv.amp_t * (std::exp(im * drv.phi) * kron(id, a) + std::exp(-im * drv.phi) * kron(id, adag));
    return h;
}

AlphaRates alpha_static(const DeviceParams& dev) {
    const double eta = dev.eta_mean();
    const double delta = dev.delta();
    const double j2 = dev.j_coupling * dev.j_coupling;
    guard_poles({delta, delta - eta, delta + eta, delta - 2 * eta, delta + 2 * eta});
    AlphaRates a;
    a.a11 = 4.0 * eta * j2 / ((delta - eta) * (delta + eta));
    a.a12 = 2.0 * eta * j2 * (4.0 * delta - 5.0 * eta) / (delta * (delta - 2.0 * eta) * (delta - eta));
    a.a21 = 2.0 * eta * j2 * (4.0 * delta + 5.0 * eta) / (delta * (delta + 2.0 * eta) * (delta + eta));
    a.a22 = 4.0 * a.a11;
    return a;
}

AlphaRates alpha_driven(const DeviceParams& dev, const DriveParams& drv) {
    const double eta = dev.eta_mean();
    const double dc = dev.omega_c - drv.omega_d;
    const double dt = dev.omega_t - drv.omega_d;
    guard_poles({dc, dt, dc + eta, dt + eta, dc + 2 * eta, dt + 2 * eta});
    AlphaRates a;
    a.a11 = 8.0 * std::cos(drv.phi) * eta * eta * drv.amp_c * drv.amp_t * dev.j_coupling /
            (dc * dt * (dc + eta) * (dt + eta));
    const double r12 = (2.0 * dt + eta) / (dt + 2.0 * eta);
    const double r21 = (2.0 * dc + eta) / (dc + 2.0 * eta);
    a.a12 = a.a11 * r12;
    a.a21 = a.a11 * r21;
    a.a22 = a.a11 * r12 * r21;
    return a;
}

double PulseSchedule::total_time() const {
    double t = 0.0;
    for (const auto& s : segments)
        if (const auto* d = std::get_if<DriveSegment>(&s)) t += d->total;
    return t;
}

PulseSchedule PulseSchedule::echoed(const DriveParams& drv, double tau, double ramp) {
    PulseSchedule s;
    s.segments = {DriveSegment{drv, tau, ramp}, EchoSegment{}, DriveSegment{drv, tau, ramp},
                  EchoSegment{}};
    return s;
}

std::string PulseSchedule::to_json() const {
    ordered_json j;
    j["version"] = 1;
    j["segments"] = ordered_json::array();
    for (const auto& s : segments) {
        if (const auto* d = std::get_if<DriveSegment>(&s)) {
            ordered_json seg;
            seg["type"] = "drive";
            seg["omega_d"] = d->drive.omega_d / (2 * pi);
            seg["amp_c"] = d->drive.amp_c / (2 * pi);
            seg["amp_t"] = d->drive.amp_t / (2 * pi);
            seg["phi"] = d->drive.phi;
            seg["total"] = d->total;
            seg["ramp"] = d->ramp;
            j["segments"].push_back(std::move(seg));
        } else {
            j["segments"].push_back(ordered_json{{"type", "echo"}});
        }
    }
    j["virtual_z"] = virtual_z;
    return j.dump(2);
}

PulseSchedule PulseSchedule::from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    PulseSchedule s;
    for (const auto& seg : j.at("segments")) {
        const auto type = seg.at("type").get<std::string>();
        if (type == "drive") {
            DriveSegment d;
            d.drive.omega_d = seg.at("omega_d").get<double>() * 2 * pi;
            d.drive.amp_c = seg.at("amp_c").get<double>() * 2 * pi;
            d.drive.amp_t = seg.at("amp_t").get<double>() * 2 * pi;
            d.drive.phi = seg.at("phi").get<double>();
            d.total = seg.at("total").get<double>();
            d.ramp = seg.at("ramp").get<double>();
            if (d.ramp > 0.5 * d.total + 1e-15)
                throw std::invalid_argument("schedule: ramp exceeds total/2");
            s.segments.push_back(d);
        } else if (type == "echo") {
            s.segments.push_back(EchoSegment{});
        } else {
            throw std::invalid_argument("schedule: unknown segment type " + type);
        }
    }
    if (j.contains("virtual_z")) {
        const auto vz = j.at("virtual_z").get<std::vector<double>>();
        if (vz.size() != 4) throw std::invalid_argument("schedule: virtual_z needs 4 angles");
        std::copy(vz.begin(), vz.end(), s.virtual_z.begin());
    }
    return s;
}

Mat dressed_basis(const DeviceParams& dev, double /*omega_d*/) {
    // static eigenvectors do not depend on the frame frequency (the shift
    // commutes with the exchange coupling); assign by dominant bare component
    DriveParams off;
    off.omega_d = dev.omega_c;  // any frame
    const Mat h = rwa_hamiltonian(dev, off);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const int d = dev.d_trunc;
    Mat t = Mat::Zero(d * d, 9);
    std::vector<bool> used(d * d, false);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int bare = i * d + j;
            int best = -1;
            double best_w = -1.0;
            for (int k = 0; k < d * d; ++k) {
                if (used[k]) continue;
                const double w = std::abs(es.eigenvectors()(bare, k));
                if (w > best_w) {
                    best_w = w;
                    best = k;
                }
            }
            used[best] = true;
            Vec v = es.eigenvectors().col(best);
            // gauge: dominant component real positive
            if (std::abs(v(bare)) < 1e-6)
                throw std::runtime_error("dressed_basis: hybridization too strong to assign labels");
            const cxd ph = v(bare) / std::abs(v(bare));
            t.col(3 * i + j) = v / ph;
        }
    return t;
}

namespace {

double flat_top_envelope(double t, double total, double ramp) {
    if (t <= 0.0 || t >= total) return 0.0;
    if (t < ramp) return 0.5 * (1.0 - std::cos(pi * t / ramp));
    if (t > total - ramp) return 0.5 * (1.0 - std::cos(pi * (total - t) / ramp));
    return 1.0;
}

Mat herm_exp(const Mat& h, double dt) {  // exp(-i h dt), h Hermitian
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Vec phases = (-im * dt * es.eigenvalues().array().cast<cxd>()).exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// coherent propagator of one drive segment via exact flat top and CF4
/// (two-exponential commutator-free Magnus) steps across the ramps
Mat segment_unitary(const Mat& h0, const Mat& hd, const DriveSegment& seg, int steps_per_ramp) {
    constexpr double c1 = 0.5 - 0.28867513459481288225;  // 1/2 -+ sqrt(3)/6
    constexpr double c2 = 0.5 + 0.28867513459481288225;
    constexpr double a1 = 0.25 + 0.28867513459481288225;  // 1/4 +- sqrt(3)/6
    constexpr double a2 = 0.25 - 0.28867513459481288225;

    const double ramp = std::min(seg.ramp, 0.5 * seg.total);
    const double flat = seg.total - 2.0 * ramp;
    const int dim = static_cast<int>(h0.rows());
    Mat u = Mat::Identity(dim, dim);

    auto cf4_span = [&](double t0, double t1) {
        const int steps = std::max(2, steps_per_ramp);
        const double h = (t1 - t0) / steps;
        for (int s = 0; s < steps; ++s) {
            const double ts = t0 + s * h;
            const double f1 = flat_top_envelope(ts + c1 * h, seg.total, ramp);
            const double f2 = flat_top_envelope(ts + c2 * h, seg.total, ramp);
            const Mat e_first = herm_exp(0.5 * h0 + (a1 * f1 + a2 * f2) * hd, h);
            const Mat e_last = herm_exp(0.5 * h0 + (a2 * f1 + a1 * f2) * hd, h);
            u = e_last * e_first * u;
        }
    };

    if (ramp > 0.0) cf4_span(0.0, ramp);
    if (flat > 0.0) u = herm_exp(h0 + hd, flat) * u;
    if (ramp > 0.0) cf4_span(seg.total - ramp, seg.total);
    return u;
}

struct LindbladOps {
    std::vector<Mat> collapse;  // embedded on d^2
};

LindbladOps collapse_operators(const DeviceParams& dev) {
    const int d = dev.d_trunc;
    const Mat id = Mat::Identity(d, d);
    LindbladOps ops;
    auto add = [&](const Coherence& coh, bool control) {
        auto embed2 = [&](const Mat& l) { return control ? kron(l, id) : kron(id, l); };
        const double g10 = coh.t1_01 ? 1.0 / *coh.t1_01 : 0.0;
        const double g21 = coh.t1_12 ? 1.0 / *coh.t1_12 : 0.0;
        if (g10 > 0) {
            Mat l = Mat::Zero(d, d);
            l(0, 1) = std::sqrt(g10);
            ops.collapse.push_back(embed2(l));
        }
        if (g21 > 0) {
            Mat l = Mat::Zero(d, d);
            l(1, 2) = std::sqrt(g21);
            ops.collapse.push_back(embed2(l));
        }
        // level dephasing rates solved from the two subspace Ramsey rates
        const double gphi01 = coh.t2_01 ? std::max(0.0, 1.0 / *coh.t2_01 - 0.5 * g10) : 0.0;
        const double gphi12 =
            coh.t2_12 ? std::max(0.0, 1.0 / *coh.t2_12 - 0.5 * (g10 + g21)) : 0.0;
        const double gl1 = gphi01;
        const double gl2 = std::max(0.0, gphi12 - gphi01);
        if (gl1 > 0) {
            Mat l = Mat::Zero(d, d);
            l(1, 1) = std::sqrt(2.0 * gl1);
            ops.collapse.push_back(embed2(l));
        }
        if (gl2 > 0) {
            Mat l = Mat::Zero(d, d);
            l(2, 2) = std::sqrt(2.0 * gl2);
            ops.collapse.push_back(embed2(l));
        }
    };
    add(dev.coh_c, true);
    add(dev.coh_t, false);
    return ops;
}

Mat dissipator_superop(const std::vector<Mat>& collapse, int dim) {
    Mat d_hat = Mat::Zero(dim * dim, dim * dim);
    const Mat id = Mat::Identity(dim, dim);
    for (const Mat& l : collapse) {
        const Mat ldl = l.adjoint() * l;
        d_hat += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
    }
    return d_hat;
}

Mat conj_superop(const Mat& u) { return kron(u.conjugate(), u); }

struct PropagationPass {
    Mat unitary_full;  // closed-system propagator, d^2 x d^2
    Mat y;             // decoherent path: vec'd states for the 81 qutrit inputs
};

PropagationPass run_schedule(const DeviceParams& dev, const PulseSchedule& sched,
                             const PropagateOptions& opts, int steps_per_ramp, double flat_step,
                             const Mat& t_dressed) {
    const int d = dev.d_trunc;
    const int dim = d * d;
    DriveParams frame;
    // the drive frame follows the first drive segment's frequency
    for (const auto& s : sched.segments)
        if (const auto* ds = std::get_if<DriveSegment>(&s)) {
            frame.omega_d = ds->drive.omega_d;
            break;
        }

    const Mat echo9 = kron(native_gate_matrix(GateKind::X12Pi), native_gate_matrix(GateKind::X12Pi));
    const Mat echo_full = t_dressed * echo9 * t_dressed.adjoint() +
                          (Mat::Identity(dim, dim) - t_dressed * t_dressed.adjoint());

    PropagationPass pass;
    pass.unitary_full = Mat::Identity(dim, dim);

    LindbladOps lops;
    Mat d_hat;
    std::map<long long, Mat> ehalf_cache;  // keyed by picosecond-quantized step
    if (opts.decoherence) {
        lops = collapse_operators(dev);
        d_hat = dissipator_superop(lops.collapse, dim);
        pass.y.resize(dim * dim, 81);
        // column j*9+i carries vec(E(|i><j|)), the column-major vec convention
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) {
                const Mat rho = t_dressed.col(i) * t_dressed.col(j).adjoint();
                pass.y.col(j * 9 + i) = Eigen::Map<const Vec>(rho.data(), dim * dim);
            }
    }

    auto ehalf = [&](double hstep) -> const Mat& {
        const long long key = static_cast<long long>(std::llround(hstep * 1e15));
        auto it = ehalf_cache.find(key);
        if (it == ehalf_cache.end())
            it = ehalf_cache.emplace(key, (0.5 * hstep * d_hat).exp().eval()).first;
        return it->second;
    };

    auto apply_block = [&](const Mat& u_block, double dt) {
        pass.unitary_full = u_block * pass.unitary_full;
        if (opts.decoherence) {
            const Mat& e = ehalf(dt);
            pass.y = e * (conj_superop(u_block) * (e * pass.y));
        }
    };

    for (const auto& s : sched.segments) {
        if (std::holds_alternative<EchoSegment>(s)) {
            pass.unitary_full = echo_full * pass.unitary_full;
            if (opts.decoherence) pass.y = conj_superop(echo_full) * pass.y;
            continue;
        }
        const auto& seg = std::get<DriveSegment>(s);
        DriveParams drv = seg.drive;
        const Mat h_full = rwa_hamiltonian(dev, drv);
        DriveParams off = drv;
        off.amp_c = off.amp_t = 0.0;
        const Mat h0 = rwa_hamiltonian(dev, off);
        const Mat hd = h_full - h0;

        if (!opts.decoherence) {
            apply_block(segment_unitary(h0, hd, seg, steps_per_ramp), seg.total);
            continue;
        }
        // decoherent path: coherent blocks of ~flat_step with a Strang-split dissipator
        const double ramp = std::min(seg.ramp, 0.5 * seg.total);
        const double flat = seg.total - 2.0 * ramp;
        auto blocks_over = [&](double t0, double span, bool in_ramp) {
            if (span <= 0.0) return;
            const int nblocks = std::max(1, static_cast<int>(std::ceil(span / flat_step)));
            const double bl = span / nblocks;
            for (int b = 0; b < nblocks; ++b) {
                Mat u_block;
                if (in_ramp) {
                    // reuse the CF4 stepper on the sub-interval
                    const int sub_steps =
                        std::max(2, static_cast<int>(std::lround(steps_per_ramp * bl / ramp)));
                    Mat u = Mat::Identity(dim, dim);
                    constexpr double c1 = 0.5 - 0.28867513459481288225;
                    constexpr double c2 = 0.5 + 0.28867513459481288225;
                    constexpr double a1 = 0.25 + 0.28867513459481288225;
                    constexpr double a2 = 0.25 - 0.28867513459481288225;
                    const double h = bl / sub_steps;
                    for (int st = 0; st < sub_steps; ++st) {
                        const double ts = t0 + b * bl + st * h;
                        const double f1 = flat_top_envelope(ts + c1 * h, seg.total, ramp);
                        const double f2 = flat_top_envelope(ts + c2 * h, seg.total, ramp);
                        const Mat e_first = herm_exp(0.5 * h0 + (a1 * f1 + a2 * f2) * hd, h);
                        const Mat e_last = herm_exp(0.5 * h0 + (a2 * f1 + a1 * f2) * hd, h);
                        u = e_last * e_first * u;
                    }
                    u_block = u;
                } else {
                    u_block = herm_exp(h0 + hd, bl);
                }
                apply_block(u_block, bl);
            }
        };
        blocks_over(0.0, ramp, true);
        blocks_over(ramp, flat, false);
        blocks_over(seg.total - ramp, ramp, true);
    }
    return pass;
}

}  // namespace

Channel PropagateResult::channel() const {
    if (!is_channel) return Channel::from_unitary(unitary);
    return Channel::from_superop(superop);
}

PropagateResult propagate(const DeviceParams& dev, const PulseSchedule& sched,
                          const PropagateOptions& opts) {
    const Mat t_dressed = dressed_basis(dev, 0.0);

    auto project = [&](const PropagationPass& pass) {
        PropagateResult r;
        // virtual-Z cleanup in the 9-dim gate frame
        const Mat zc = z01_matrix(sched.virtual_z[0]) * z12_matrix(sched.virtual_z[1]);
        const Mat zt = z01_matrix(sched.virtual_z[2]) * z12_matrix(sched.virtual_z[3]);
        const Mat z9 = kron(zc, zt);
        if (!opts.decoherence) {
            r.unitary = z9 * (t_dressed.adjoint() * pass.unitary_full * t_dressed);
            r.unitary_full = pass.unitary_full;
            r.is_channel = false;
            double leak = 0.0;
            for (int i = 0; i < 9; ++i) leak = std::max(leak, 1.0 - r.unitary.col(i).squaredNorm());
            r.leakage = leak;
        } else {
            const int dim = dev.d_trunc * dev.d_trunc;
            r.superop.resize(81, 81);
            for (int col = 0; col < 81; ++col) {
                const Mat rho_full =
                    Eigen::Map<const Mat>(pass.y.col(col).data(), dim, dim);
                const Mat rho9 = z9 * (t_dressed.adjoint() * rho_full * t_dressed) * z9.adjoint();
                r.superop.col(col) = Eigen::Map<const Vec>(rho9.data(), 81);
            }
            r.is_channel = true;
            double leak = 0.0;
            for (int i = 0; i < 9; ++i) {
                const Mat rho9 = Eigen::Map<const Mat>(r.superop.col(i * 9 + i).data(), 9, 9);
                leak = std::max(leak, 1.0 - rho9.real().trace());
            }
            r.leakage = leak;
        }
        return r;
    };

    const auto pass = run_schedule(dev, sched, opts, opts.steps_per_ramp, opts.flat_step, t_dressed);
    PropagateResult result = project(pass);

    if (opts.richardson_check) {
        const auto fine =
            run_schedule(dev, sched, opts, 2 * opts.steps_per_ramp, 0.5 * opts.flat_step, t_dressed);
        PropagateResult rf = project(fine);
        rf.richardson_error = opts.decoherence
                                  ? (result.superop - rf.superop).cwiseAbs().maxCoeff()
                                  : (result.unitary - rf.unitary).cwiseAbs().maxCoeff();
        if (rf.richardson_error > opts.richardson_tol)
            throw std::runtime_error(
                "propagate: integration tolerance not met; raise steps_per_ramp or lower flat_step");
        return rf;
    }
    return result;
}

AlphaRates extract_entangling_phases(const Mat& u, double offdiag_tol) {
    if (u.rows() != 9 || u.cols() != 9)
        throw std::invalid_argument("extract_entangling_phases: need a 9x9 matrix");
    double off = 0.0, tot = 0.0;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            const double m = std::norm(u(i, j));
            tot += m;
            if (i != j) off += m;
        }
    if (off / tot > offdiag_tol)
        throw std::runtime_error("extract_entangling_phases: off-diagonal leakage above threshold");

    auto theta = [&](int i, int j) { return std::arg(u(3 * i + j, 3 * i + j)); };
    auto comb = [&](int i, int j) {
        return wrap_angle(theta(i, j) + theta(0, 0) - theta(i, 0) - theta(0, j));
    };
    return AlphaRates{comb(1, 1), comb(1, 2), comb(2, 1), comb(2, 2)};
}

SlopeFit measure_alpha_propagated(const DeviceParams& dev, const DriveParams& drv,
                                  const std::vector<double>& durations, double ramp,
                                  const PropagateOptions& opts) {
    if (durations.size() < 3) throw std::invalid_argument("need at least 3 durations");
    std::vector<std::array<double, 4>> phases;
    for (double total : durations) {
        PulseSchedule s;
        s.segments = {DriveSegment{drv, total, ramp}};
        const auto res = propagate(dev, s, opts);
        const auto ph = extract_entangling_phases(res.unitary, 5e-2);
        phases.push_back(ph.as_array());
    }
    // unwrap each channel across durations, then fit slope + intercept
    SlopeFit out;
    std::array<double*, 4> rate_ptr = {&out.rates.a11, &out.rates.a12, &out.rates.a21,
                                       &out.rates.a22};
    std::array<double*, 4> err_ptr = {&out.stderr_rates.a11, &out.stderr_rates.a12,
                                      &out.stderr_rates.a21, &out.stderr_rates.a22};
    double max_gap = 0.0;
    for (std::size_t i = 1; i < durations.size(); ++i)
        max_gap = std::max(max_gap, durations[i] - durations[i - 1]);
    for (int ch = 0; ch < 4; ++ch) {
        std::vector<double> y(durations.size());
        y[0] = phases[0][ch];
        for (std::size_t i = 1; i < y.size(); ++i)
            y[i] = y[i - 1] + wrap_angle(phases[i][ch] - y[i - 1]);
        const auto fit = linear_fit(durations, y);
        // evolution accumulates phase as -alpha * t
        *rate_ptr[ch] = -fit.slope;
        *err_ptr[ch] = fit.slope_stderr;
        if (std::abs(fit.slope) * max_gap >= pi)
            throw std::runtime_error(
                "measure_alpha_propagated: phase advance per step >= pi; use denser durations");
    }
    return out;
}

}  // namespace qkt
