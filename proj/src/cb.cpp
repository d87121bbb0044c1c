#include "qkt/cb.hpp"

#include <array>
#include <stdexcept>

#include "qkt/decompose.hpp"
#include "qkt/parallel.hpp"
#include "qkt/randomu.hpp"
#include "qkt/stats.hpp"

namespace qkt {
namespace cb {

std::vector<WeylLabel> all_channels() {
    std::vector<WeylLabel> out;
    for (int l = 1; l < 81; ++l) out.push_back(WeylLabel::from_index(l, 2));
    return out;
}

std::vector<WeylLabel> channel_subset(int count, std::uint64_t seed) {
    auto all = all_channels();
    Rng rng(seed);
    // Fisher-Yates prefix
    for (int i = 0; i < count && i < static_cast<int>(all.size()); ++i) {
        const int j = i + static_cast<int>(rng.below(all.size() - i));
        std::swap(all[i], all[j]);
    }
    all.resize(std::min<std::size_t>(count, all.size()));
    return all;
}

namespace {

/// per-label single-qutrit tables: eigenbasis ordered so outcome j maps to
/// eigenvalue omega^j, plus a preparation circuit for the +1 eigenvector
struct WeylFactorTable {
    std::array<std::vector<Gate>, 9> prep;       // gates on qutrit 0
    std::array<std::vector<Gate>, 9> measure;    // rotation into the eigenbasis
    std::array<Mat, 9> eigvecs;                  // columns ordered 1, w, w^2
};

const WeylFactorTable& factor_table() {
    static const WeylFactorTable table = [] {
        WeylFactorTable t;
        for (int l = 0; l < 9; ++l) {
            const WeylLabel lab{{l / 3}, {l % 3}};
            if (l == 0) {
                t.eigvecs[l] = Mat::Identity(3, 3);
                continue;  // identity factor: prepare |0>, measure directly
            }
            const Mat w = weyl_matrix(lab);
            Eigen::ComplexEigenSolver<Mat> es(w);
            // order eigenvectors by eigenvalue phase 0, 2pi/3, -2pi/3
            Mat v(3, 3);
            std::array<bool, 3> used{false, false, false};
            for (int slot = 0; slot < 3; ++slot) {
                const cxd want = std::pow(omega3, slot);
                int best = -1;
                double dist = 1e9;
                for (int k = 0; k < 3; ++k) {
                    if (used[k]) continue;
                    const double d = std::abs(es.eigenvalues()(k) - want);
                    if (d < dist) {
                        dist = d;
                        best = k;
                    }
                }
                used[best] = true;
                v.col(slot) = es.eigenvectors().col(best).normalized();
            }
            t.eigvecs[l] = v;
            // preparation: unitary with first column = +1 eigenvector
            Mat p(3, 3);
            p.col(0) = v.col(0);
            // complete to a unitary via Gram-Schmidt on the eigenbasis columns
            p.col(1) = v.col(1);
            p.col(2) = v.col(2);
            t.prep[l] = decompose_su3(p);
            t.measure[l] = decompose_su3(v.adjoint().eval());
        }
        return t;
    }();
    return table;
}

std::vector<Gate> on_qutrit(const std::vector<Gate>& gates, int q) {
    std::vector<Gate> out = gates;
    for (auto& g : out) g.targets = {q};
    return out;
}

/// Weyl layers compiled into native pulses, cached per single-qutrit label
const std::vector<Gate>& weyl_native(int label9) {
    static const std::array<std::vector<Gate>, 9> table = [] {
        std::array<std::vector<Gate>, 9> t;
        for (int l = 0; l < 9; ++l)
            t[l] = decompose_su3(weyl_matrix(WeylLabel{{l / 3}, {l % 3}}));
        return t;
    }();
    return table[label9];
}

int action_order(const CliffordAction& a) {
    // order of the label permutation (the cycle order on labels)
    std::vector<int> cur(a.perm.size());
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = static_cast<int>(i);
    for (int ord = 1; ord <= 360; ++ord) {
        std::vector<int> next(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i) next[i] = a.perm[cur[i]];
        cur = next;
        bool done = true;
        for (std::size_t i = 0; i < cur.size(); ++i)
            if (cur[i] != static_cast<int>(i)) {
                done = false;
                break;
            }
        if (done) return ord;
    }
    return 360;
}

}  // namespace

CBCircuit cb_circuit(const Circuit& cycle, int m, const WeylLabel& u0, Rng& rng) {
    if (m < 0) throw std::invalid_argument("cb_circuit: depth must be >= 0");
    const Mat cu = cycle.unitary();
    const auto action = is_clifford(cu);
    if (!action) throw std::invalid_argument("cb_circuit: cycle is not Clifford");

    CBCircuit out;
    out.circuit = Circuit(cycle.n_qutrits);
    out.circuit.label = "cb";
    out.weight = cxd(1.0, 0.0);

    WeylLabel uj = u0;
    for (int j = 0; j <= m; ++j) {
        const WeylLabel wj = random_weyl_label(cycle.n_qutrits, rng);
        out.weight *= std::conj(weyl_character(uj, wj));
        for (int q = 0; q < cycle.n_qutrits; ++q) {
            const int l9 = 3 * wj.x[q] + wj.z[q];
            if (l9 == 0) continue;
            for (const auto& g : on_qutrit(weyl_native(l9), q)) out.circuit.ops.push_back(g);
        }
        if (j < m) {
            for (const auto& g : cycle.ops) out.circuit.ops.push_back(g);
            uj = action->apply(uj);
        }
    }
    out.meas_label = uj;  // C^m U_0 C^-m

    // phase of the conjugated operator relative to its label representative
    Mat cm = Mat::Identity(cu.rows(), cu.cols());
    for (int j = 0; j < m; ++j) cm = cu * cm;
    const Mat conj_op = cm * weyl_matrix(u0) * cm.adjoint();
    const cxd tr = (weyl_matrix(uj).adjoint() * conj_op).trace() / static_cast<double>(cu.rows());
    out.meas_phase = tr / std::abs(tr);
    return out;
}

double isolate_gate_error(double f_dressed, double f_ref) {
    if (f_ref <= 0.0) throw std::invalid_argument("isolate_gate_error: reference fidelity is zero");
    constexpr double d = 9.0;
    return 1.0 - (d - 1.0) / d * (1.0 - f_dressed / f_ref);
}

CBResult run_cb(const CBConfig& config, const Backend& backend, Rng& rng) {
    if (config.depths.empty() || config.channels.empty())
        throw std::invalid_argument("run_cb: depths and channels must be non-empty");
    for (const auto& ch : config.channels)
        if (ch.is_identity()) throw std::invalid_argument("run_cb: identity channel not allowed");

    const auto& table = factor_table();
    const int n_ch = static_cast<int>(config.channels.size());
    const int n_d = static_cast<int>(config.depths.size());
    const int n_r = config.n_randomizations;

    CBResult result;
    result.depths = config.depths;
    result.shots = config.shots;
    result.raw_expectations.assign(n_ch, std::vector<std::vector<cxd>>(n_d, std::vector<cxd>(n_r)));
    result.weighted_values.assign(n_ch,
                                  std::vector<std::vector<double>>(n_d, std::vector<double>(n_r)));
    {
        const auto action = is_clifford(config.cycle.unitary());
        if (!action) throw std::invalid_argument("run_cb: cycle is not Clifford");
        result.cycle_order = action_order(*action);
    }

    parallel_for(static_cast<std::size_t>(n_ch) * n_d * n_r, default_threads(), [&](std::size_t t) {
        const int r = static_cast<int>(t % n_r);
        const int di = static_cast<int>((t / n_r) % n_d);
        const int ci = static_cast<int>(t / (static_cast<std::size_t>(n_r) * n_d));
        const WeylLabel& u0 = config.channels[ci];
        const int m = config.depths[di];

        Rng crng = rng.split(((static_cast<std::uint64_t>(ci) * 64 + di) * 1024 + r) * 2 + 1);
        auto built = cb_circuit(config.cycle, m, u0, crng);

        // eigen-preparation of U0 and measurement rotation of the conjugated label
        Circuit full(config.cycle.n_qutrits);
        for (int q = 0; q < 2; ++q) {
            const int l9 = 3 * u0.x[q] + u0.z[q];
            if (l9 == 0) continue;
            for (const auto& g : on_qutrit(table.prep[l9], q)) full.ops.push_back(g);
        }
        for (const auto& g : built.circuit.ops) full.ops.push_back(g);
        std::array<int, 2> meas_l9{};
        for (int q = 0; q < 2; ++q) {
            meas_l9[q] = 3 * built.meas_label.x[q] + built.meas_label.z[q];
            if (meas_l9[q] == 0) continue;
            for (const auto& g : on_qutrit(table.measure[meas_l9[q]], q)) full.ops.push_back(g);
        }

        const auto counts = backend.sample(full, config.shots, crng);
        cxd mu(0.0, 0.0);
        for (int o = 0; o < 9; ++o) {
            if (counts[o] == 0) continue;
            const int ja = o / 3, jb = o % 3;
            cxd eig(1.0, 0.0);
            if (meas_l9[0] != 0) eig *= std::pow(omega3, ja);
            if (meas_l9[1] != 0) eig *= std::pow(omega3, jb);
            mu += static_cast<double>(counts[o]) / config.shots * eig;
        }
        // the chi*-weighted protocol pairs with the adjoint observable: the
        // estimate is tr(Q^dag rho), the conjugate of the raw eigenvalue sum
        mu = std::conj(mu * built.meas_phase);
        result.raw_expectations[ci][di][r] = mu;
        result.weighted_values[ci][di][r] = std::real(built.weight * mu);
    });

    // per-channel decay fits
    double sum_f = 0.0, var_f = 0.0;
    int n_ok = 0;
    for (int ci = 0; ci < n_ch; ++ci) {
        DecayRecord rec;
        rec.channel = config.channels[ci];
        std::vector<double> mdep, ymean, yerr;
        for (int di = 0; di < n_d; ++di) {
            const auto& vals = result.weighted_values[ci][di];
            mdep.push_back(config.depths[di]);
            ymean.push_back(mean(vals));
            yerr.push_back(std::sqrt(std::max(sample_variance(vals), 1e-12) / vals.size()));
        }
        try {
            const auto fit = fit_exp_decay(mdep, ymean, yerr);
            rec.amplitude = fit.amplitude;
            rec.decay = fit.rate;
            rec.decay_stderr = fit.rate_stderr;
            rec.ok = fit.ok;
        } catch (const std::exception&) {
            rec.ok = false;
        }
        if (rec.ok) {
            sum_f += rec.decay;
            var_f += rec.decay_stderr * rec.decay_stderr;
            ++n_ok;
        }
        result.records.push_back(rec);
    }
    if (n_ok == 0) throw std::runtime_error("run_cb: no channel produced a usable fit");
    result.composite_fidelity = (1.0 + sum_f) / (n_ok + 1.0);
    result.composite_stderr = std::sqrt(var_f) / (n_ok + 1.0);
    return result;
}

UnitarityEstimate unitarity_from_cb_variance(const CBResult& result) {
    UnitarityEstimate est;
    const int s = std::max(1, result.cycle_order);
    std::vector<double> mdep, var;
    for (std::size_t di = 0; di < result.depths.size(); ++di) {
        const int m = result.depths[di];
        if (m % s != 0) continue;
        // pooled variance of the complex raw expectations over randomizations
        // and channels, with the multinomial shot-noise term removed
        double acc = 0.0;
        int n = 0;
        for (const auto& per_channel : result.raw_expectations) {
            const auto& vals = per_channel[di];
            if (vals.size() < 2) continue;
            cxd m1(0, 0);
            double m2 = 0.0, shot = 0.0;
            for (const cxd& v : vals) {
                m1 += v;
                m2 += std::norm(v);
                shot += (1.0 - std::norm(v)) / result.shots;
            }
            const double nn = static_cast<double>(vals.size());
            m1 /= nn;
            const double svar = (m2 / nn - std::norm(m1)) * nn / (nn - 1.0);
            acc += svar - shot / nn;
            ++n;
        }
        if (n == 0) continue;
        mdep.push_back(m);
        var.push_back(acc / n);
        est.depths.push_back(m);
    }
    if (mdep.size() < 2)
        throw std::invalid_argument("unitarity: need >= 2 depths that are multiples of the cycle order");
    int nonpos = 0;
    for (double v : var)
        if (v <= 0.0) ++nonpos;
    if (2 * nonpos >= static_cast<int>(var.size()))
        throw std::runtime_error("unitarity: variance estimates non-positive at half the depths");

    est.variance_per_depth = var;
    const auto fit = fit_exp_decay(mdep, var);
    const double lam = std::clamp(fit.rate, 0.0, 1.1);
    est.u = std::sqrt(lam);
    est.stderr_u = (est.u > 1e-6) ? 0.5 * fit.rate_stderr / est.u : 0.0;
    return est;
}

}  // namespace cb
}  // namespace qkt
