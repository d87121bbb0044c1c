#include "qkt/calibrate.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "qkt/gates.hpp"
#include "qkt/stats.hpp"
#include "qkt/tomography.hpp"

namespace qkt {

Mat target_unitary(TwoQutritTarget t) {
    return native_gate_matrix(t == TwoQutritTarget::CZ ? GateKind::CZ : GateKind::CZDag);
}

double gate_fidelity(const Mat& v, const Mat& target) {
    return std::norm((target.adjoint() * v).trace()) / 81.0;
}

std::array<double, 4> solve_virtual_z(const Mat& u, const Mat& target) {
    // maximize |sum_ij w_ij a_i b_j| over per-level unit phases (a, b)
    Eigen::Matrix3cd w;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            w(i, j) = std::conj(target(3 * i + j, 3 * i + j)) * u(3 * i + j, 3 * i + j);
    Eigen::Vector3cd a = Eigen::Vector3cd::Ones(), b = Eigen::Vector3cd::Ones();
    for (int it = 0; it < 60; ++it) {
        Eigen::Vector3cd na;
        for (int i = 0; i < 3; ++i) {
            cxd s = 0.0;
            for (int j = 0; j < 3; ++j) s += w(i, j) * b(j);
            na(i) = (std::abs(s) > 1e-15) ? std::conj(s / std::abs(s)) : cxd(1, 0);
        }
        Eigen::Vector3cd nb;
        for (int j = 0; j < 3; ++j) {
            cxd s = 0.0;
            for (int i = 0; i < 3; ++i) s += w(i, j) * na(i);
            nb(j) = (std::abs(s) > 1e-15) ? std::conj(s / std::abs(s)) : cxd(1, 0);
        }
        const double delta = (na - a).cwiseAbs().maxCoeff() + (nb - b).cwiseAbs().maxCoeff();
        a = na;
        b = nb;
        if (delta < 1e-14) break;
    }
    // translate phase triples into Z01/Z12 angles (middle level is the gauge)
    auto angles = [](const Eigen::Vector3cd& v) {
        const double a01 = -std::arg(v(0) / v(1));
        const double a12 = std::arg(v(2) / v(1));
        return std::pair<double, double>{a01, a12};
    };
    const auto [c01, c12] = angles(a);
    const auto [t01, t12] = angles(b);
    return {c01, c12, t01, t12};
}

double solve_tau(double s1, double s2, TwoQutritTarget target, double tau_max) {
    const double t11 = (target == TwoQutritTarget::CZ) ? 2.0 * pi / 3.0 : -2.0 * pi / 3.0;
    const double t12 = -t11;
    if (std::abs(s1) < 1e-3) return 0.0;
    double best_tau = 0.0, best_res = 0.25;  // rad tolerance for a coarse candidate
    for (int k = -12; k <= 12; ++k) {
        const double tau = (-t11 + 2.0 * pi * k) / s1;
        if (tau <= 0.0 || tau > tau_max) continue;
        const double res = std::abs(wrap_angle(-s2 * tau - t12));
        if (res < best_res || (std::abs(res - best_res) < 1e-12 && tau < best_tau)) {
            best_res = res;
            best_tau = tau;
        }
    }
    return best_tau;
}

namespace {

struct NmProblem {
    std::function<double(const std::vector<double>&)> f;
};

double nm_eval(const gsl_vector* v, void* params) {
    auto* prob = static_cast<NmProblem*>(params);
    std::vector<double> x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
    return prob->f(x);
}

/// derivative-free local refinement (Nelder-Mead, nmsimplex2)
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, std::vector<double> step, int max_evals) {
    gsl_set_error_handler_off();
    NmProblem prob{f};
    gsl_multimin_function func;
    func.n = x0.size();
    func.f = &nm_eval;
    func.params = &prob;

    gsl_vector* x = gsl_vector_alloc(x0.size());
    gsl_vector* s = gsl_vector_alloc(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        gsl_vector_set(x, i, x0[i]);
        gsl_vector_set(s, i, step[i]);
    }
    gsl_multimin_fminimizer* m =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, x0.size());
    gsl_multimin_fminimizer_set(m, &func, x, s);

    int evals = static_cast<int>(x0.size()) + 1;
    while (evals < max_evals) {
        if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
        ++evals;
        if (gsl_multimin_fminimizer_size(m) < 1e-10) break;
    }
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = gsl_vector_get(m->x, i);
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(x);
    gsl_vector_free(s);
    return out;
}

struct Candidate {
    double omega_d, amp, phi, tau;
    double score;
};

}  // namespace

CalibrationReport calibrate_gate(const DeviceParams& dev, TwoQutritTarget target,
                                 const CalibrationConfig& cfg) {
    const Mat targ = target_unitary(target);
    CalibrationReport report;
    report.target_name = (target == TwoQutritTarget::CZ) ? "cz" : "czdag";

    // ---- coarse stage: perturbative alphas over the omega_d grid
    const double w_lo = std::min(dev.omega12_c(), dev.omega12_t()) + cfg.omega_margin;
    const double w_hi = std::max(dev.omega12_c(), dev.omega12_t()) - cfg.omega_margin;
    if (w_hi <= w_lo) throw std::invalid_argument("calibrate_gate: no drive window between 1->2 transitions");

    std::vector<Candidate> candidates;
    const AlphaRates stat = alpha_static(dev);
    const double s1_stat = stat.a11 + stat.a22, s2_stat = stat.a12 + stat.a21;
    for (int gw = 0; gw < cfg.omega_grid_points; ++gw) {
        const double wd = w_lo + (w_hi - w_lo) * gw / (cfg.omega_grid_points - 1.0);
        DriveParams unit;
        unit.omega_d = wd;
        unit.amp_c = unit.amp_t = 1.0;
        AlphaRates drv1;
        try {
            drv1 = alpha_driven(dev, unit);
        } catch (const PoleError&) {
            continue;
        }
        const double k1 = drv1.a11 + drv1.a22, k2 = drv1.a12 + drv1.a21;  // per amp^2
        for (double phi : {0.0, pi}) {
            const double sgn = std::cos(phi);
            for (int ga = 1; ga <= 14; ++ga) {
                const double amp = cfg.amp_max * ga / 14.0;
                const double s1 = s1_stat + sgn * k1 * amp * amp;
                const double s2 = s2_stat + sgn * k2 * amp * amp;
                const double tau = solve_tau(s1, s2, target, cfg.tau_max);
                if (tau <= 2.0 * cfg.ramp) continue;
                candidates.push_back(Candidate{wd, amp, phi, tau, tau});
            }
        }
    }
    if (candidates.empty()) throw std::runtime_error("calibrate_gate: coarse search found no branch");
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
    candidates.resize(std::min<std::size_t>(candidates.size(), cfg.top_candidates));

    // ---- refinement: Nelder-Mead on (amp, phi, tau) against propagated infidelity
    int propagations = 0;
    PropagateOptions popts;
    popts.richardson_check = false;
    popts.steps_per_ramp = cfg.steps_per_ramp;

    auto evaluate = [&](double wd, double amp, double phi, double tau, PulseSchedule* out_sched,
                        Mat* out_gate) -> double {
        if (amp <= 0 || amp > cfg.amp_max * 1.5 || tau <= 2.0 * cfg.ramp || tau > cfg.tau_max * 1.5)
            return 1.0;
        DriveParams drv;
        drv.omega_d = wd;
        drv.amp_c = drv.amp_t = amp;
        drv.phi = phi;
        PulseSchedule sched = PulseSchedule::echoed(drv, tau, cfg.ramp);
        ++propagations;
        const auto prop = propagate(dev, sched, popts);
        sched.virtual_z = solve_virtual_z(prop.unitary, targ);
        const Mat zc = z01_matrix(sched.virtual_z[0]) * z12_matrix(sched.virtual_z[1]);
        const Mat zt = z01_matrix(sched.virtual_z[2]) * z12_matrix(sched.virtual_z[3]);
        const Mat gate = kron(zc, zt) * prop.unitary;
        if (out_sched) *out_sched = sched;
        if (out_gate) *out_gate = gate;
        return 1.0 - gate_fidelity(gate, targ);
    };

    double best_inf = 1.0;
    PulseSchedule best_sched;
    double best_leak = 0.0;
    for (const auto& cand : candidates) {
        auto objective = [&](const std::vector<double>& x) {
            return evaluate(cand.omega_d, x[0], wrap_angle(x[1]), x[2], nullptr, nullptr);
        };
        const auto xr = nelder_mead(objective, {cand.amp, cand.phi, cand.tau},
                                    {0.04 * cand.amp, 0.05, 0.02 * cand.tau}, cfg.refine_evals);
        PulseSchedule sched;
        Mat gate;
        const double inf = evaluate(cand.omega_d, xr[0], wrap_angle(xr[1]), xr[2], &sched, &gate);
        if (inf < best_inf) {
            best_inf = inf;
            best_sched = sched;
            PropagateOptions lopts = popts;
            const auto prop = propagate(dev, sched, lopts);
            best_leak = prop.leakage;
        }
        if (best_inf < 1.0 - cfg.fidelity_goal) break;
    }

    report.schedule = best_sched;
    report.fidelity = 1.0 - best_inf;
    report.gate_time = best_sched.total_time();
    report.leakage = best_leak;
    report.converged = report.fidelity >= cfg.fidelity_goal - 5e-4;
    report.propagations = propagations;
    return report;
}

RamseyResult ramsey_protocol_sim(const DeviceParams& dev, const DriveParams& drv,
                                 const std::vector<double>& durations, int shots_per_setting,
                                 Rng& rng, bool decoherence, double ramp) {
    PropagateOptions popts;
    popts.decoherence = decoherence;
    popts.richardson_check = false;
    auto evolve = [&](double duration) {
        PulseSchedule sched;
        DriveSegment seg;
        seg.drive = drv;
        seg.total = duration;
        seg.ramp = std::min(ramp, 0.5 * duration);
        sched.segments = {seg};
        return propagate(dev, sched, popts).channel();
    };
    return ramsey_protocol_sim(evolve, durations, shots_per_setting, rng);
}

RamseyResult ramsey_protocol_sim(const std::function<Channel(double)>& evolve,
                                 const std::vector<double>& durations, int shots_per_setting,
                                 Rng& rng) {
    if (durations.size() < 3) throw std::invalid_argument("ramsey: need >= 3 durations");
    for (std::size_t i = 1; i < durations.size(); ++i)
        if (durations[i] <= durations[i - 1])
            throw std::invalid_argument("ramsey: durations must be strictly increasing");

    const Mat h3 = native_gate_matrix(GateKind::H3);
    const Mat had2 = kron(h3, h3);
    Vec psi0 = Vec::Zero(9);
    psi0(0) = 1.0;
    const Mat rho0 = (had2 * psi0) * (had2 * psi0).adjoint();

    RamseyResult out;
    for (std::size_t di = 0; di < durations.size(); ++di) {
        const Mat rho = evolve(durations[di]).apply(rho0);

        // measured state via full tomography at finite shots
        Rng trng = rng.split(7000 + di);
        std::vector<std::vector<int>> counts(81);
        for (int s = 0; s < 81; ++s) {
            const auto& g = tomo::setting_gates();
            const Mat big = kron(g[s / 9], g[s % 9]);
            const Mat rot = big.adjoint() * rho * big;  // readout after the adjoint rotation
            Rng srng = trng.split(s);
            counts[s] = sample_counts(rot.diagonal().real().cwiseMax(0.0), shots_per_setting, srng);
        }
        const auto rec = tomo::state_mle(counts);
        const Mat& r = rec.estimate;
        auto phase = [&](int i, int j) {
            // theta_ij + theta_00 - theta_i0 - theta_0j from two coherences
            return std::arg(r(3 * i + j, 3 * i) * r(0, j));
        };
        out.phases.push_back({phase(1, 1), phase(1, 2), phase(2, 1), phase(2, 2)});
    }

    double max_gap = 0.0;
    for (std::size_t i = 1; i < durations.size(); ++i)
        max_gap = std::max(max_gap, durations[i] - durations[i - 1]);

    std::array<double*, 4> rate_ptr = {&out.rates.a11, &out.rates.a12, &out.rates.a21,
                                       &out.rates.a22};
    std::array<double*, 4> err_ptr = {&out.stderr_rates.a11, &out.stderr_rates.a12,
                                      &out.stderr_rates.a21, &out.stderr_rates.a22};
    for (int ch = 0; ch < 4; ++ch) {
        std::vector<double> y(durations.size());
        y[0] = out.phases[0][ch];
        for (std::size_t i = 1; i < y.size(); ++i)
            y[i] = y[i - 1] + wrap_angle(out.phases[i][ch] - y[i - 1]);
        const auto fit = linear_fit(durations, y);
        *rate_ptr[ch] = -fit.slope;
        *err_ptr[ch] = fit.slope_stderr;
        if (std::abs(fit.slope) * max_gap >= pi)
            throw std::runtime_error("ramsey: phase advance per step >= pi; use denser durations");
    }
    return out;
}

}  // namespace qkt
