#include "qkt/tomography.hpp"

#include <stdexcept>

#include "qkt/algebra.hpp"
#include "qkt/parallel.hpp"

namespace qkt {
namespace tomo {

const std::vector<Mat>& setting_gates() {
    static const std::vector<Mat> gates = [] {
        auto m = [](GateKind k) { return native_gate_matrix(k); };
        std::vector<Mat> g;
        g.push_back(Mat::Identity(3, 3));
        g.push_back(m(GateKind::X01Half));
        g.push_back(m(GateKind::Y01Half));
        g.push_back(m(GateKind::X01Pi));
        g.push_back(m(GateKind::X12Pi) * m(GateKind::X01Pi));
        g.push_back(m(GateKind::Y12Pi) * m(GateKind::X01Half));
        g.push_back(m(GateKind::X12Half) * m(GateKind::X01Pi));
        g.push_back(m(GateKind::Y12Half) * m(GateKind::X01Pi));
        g.push_back(m(GateKind::X12Pi) * m(GateKind::X01Half));
        return g;
    }();
    return gates;
}

Mat povm_element(int sa, int sb, int outcome) {
    // the measurement rotates by the adjoint of the setting sequence, so the
    // outcome-j effect projects onto G|j>; the same-direction reading leaves
    // the map rank-deficient (rank 7 per qutrit instead of 9)
    const auto& g = setting_gates();
    const Mat big = kron(g.at(sa), g.at(sb));
    Vec e = Vec::Zero(9);
    e(outcome) = 1.0;
    const Vec v = big * e;
    return v * v.adjoint();
}

Mat prep_state(int sa, int sb) {
    const auto& g = setting_gates();
    Vec psi = Vec::Zero(9);
    psi(0) = 1.0;
    const Vec v = kron(g.at(sa), g.at(sb)) * psi;
    return v * v.adjoint();
}

namespace {

struct PovmTable {
    std::vector<Mat> elements;  // [81 settings * 9 outcomes]
    const Mat& at(int setting, int outcome) const { return elements[setting * 9 + outcome]; }
};

const PovmTable& povm_table() {
    static const PovmTable t = [] {
        PovmTable t;
        t.elements.reserve(81 * 9);
        for (int sa = 0; sa < 9; ++sa)
            for (int sb = 0; sb < 9; ++sb)
                for (int o = 0; o < 9; ++o) t.elements.push_back(povm_element(sa, sb, o));
        return t;
    }();
    return t;
}

const std::vector<Mat>& prep_table() {
    static const std::vector<Mat> t = [] {
        std::vector<Mat> t;
        t.reserve(81);
        for (int sa = 0; sa < 9; ++sa)
            for (int sb = 0; sb < 9; ++sb) t.push_back(prep_state(sa, sb));
        return t;
    }();
    return t;
}

Mat psd_project(const Mat& h, double floor = 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
    RVec vals = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<cxd>() *
           es.eigenvectors().adjoint();
}

double loglik_state(const Mat& rho, const std::vector<std::vector<int>>& counts) {
    const auto& povm = povm_table();
    double ll = 0.0;
    for (int s = 0; s < 81; ++s)
        for (int o = 0; o < 9; ++o) {
            const int n = counts[s][o];
            if (n == 0) continue;
            const double p =
                std::max(1e-14, std::real(povm.at(s, o).cwiseProduct(rho.conjugate()).sum()));
            ll += n * std::log(p);
        }
    return ll;
}

}  // namespace

int measurement_map_rank() {
    const auto& povm = povm_table();
    RMat map(81 * 9, 81);
    const auto& basis = ptm_basis(2);
    for (int row = 0; row < 81 * 9; ++row)
        for (int col = 0; col < 81; ++col)
            map(row, col) = std::real(povm.elements[row].cwiseProduct(basis[col].conjugate()).sum());
    Eigen::ColPivHouseholderQR<RMat> qr(map);
    qr.setThreshold(1e-9);
    return static_cast<int>(qr.rank());
}

ReconstructionResult state_mle(const std::vector<std::vector<int>>& counts,
                               const MleOptions& opts) {
    if (counts.size() != 81) throw std::invalid_argument("state_mle: need 81 settings");
    const auto& povm = povm_table();

    // linear-inversion start: rho = sum_k coeff_k B_k from frequency matching,
    // solved in the Gell-Mann basis, then projected onto physical states
    const auto& basis = ptm_basis(2);
    RMat a(81 * 9, 81);
    RVec f(81 * 9);
    long long total = 0;
    for (int s = 0; s < 81; ++s) {
        long long shots = 0;
        for (int o = 0; o < 9; ++o) shots += counts[s][o];
        total += shots;
        for (int o = 0; o < 9; ++o) {
            const int row = s * 9 + o;
            f(row) = shots > 0 ? static_cast<double>(counts[s][o]) / shots : 0.0;
            for (int col = 0; col < 81; ++col)
                a(row, col) =
                    std::real(povm.at(s, o).cwiseProduct(basis[col].conjugate()).sum());
        }
    }
    if (total < opts.shots_floor) throw std::invalid_argument("state_mle: insufficient counts");
    const RVec coeff = a.colPivHouseholderQr().solve(f);
    Mat rho = Mat::Zero(9, 9);
    for (int k = 0; k < 81; ++k) rho += coeff(k) * basis[k];
    rho = psd_project(rho, 1e-10);
    rho /= rho.trace();

    ReconstructionResult res;
    double ll = loglik_state(rho, counts);
    res.loglik_trace.push_back(ll);
    for (int it = 0; it < opts.max_iterations; ++it) {
        // R operator of the RrhoR fixed point
        Mat r = Mat::Zero(9, 9);
        for (int s = 0; s < 81; ++s)
            for (int o = 0; o < 9; ++o) {
                const int n = counts[s][o];
                if (n == 0) continue;
                const double p =
                    std::max(1e-14, std::real(povm.at(s, o).cwiseProduct(rho.conjugate()).sum()));
                r += (static_cast<double>(n) / p) * povm.at(s, o);
            }
        r /= static_cast<double>(total);

        double beta = 1.0;
        Mat best = rho;
        double best_ll = ll;
        for (int halve = 0; halve < 12; ++halve) {
            const Mat g = beta < 1.0
                              ? ((1.0 - beta) * Mat::Identity(9, 9) + beta * r).eval()
                              : r;
            Mat cand = g * rho * g.adjoint();
            cand /= cand.trace();
            const double cand_ll = loglik_state(cand, counts);
            if (cand_ll >= best_ll) {
                best = cand;
                best_ll = cand_ll;
                break;
            }
            beta *= 0.5;  // dilute toward the identity direction
        }
        const double gain = best_ll - ll;
        rho = best;
        ll = best_ll;
        res.loglik_trace.push_back(ll);
        res.iterations = it + 1;
        if (std::abs(gain) <= opts.rel_tol * std::abs(ll)) {
            res.converged = true;
            break;
        }
    }
    res.estimate = rho;
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    res.min_eigenvalue = es.eigenvalues().minCoeff();
    res.trace_error = std::abs(rho.trace().real() - 1.0);
    return res;
}

ReconstructionResult state_tomography(const Circuit& prep, const Backend& backend,
                                      int shots_per_setting, Rng& rng, const MleOptions& opts) {
    const auto& gates = setting_gates();
    std::vector<std::vector<int>> counts(81);
    std::vector<Rng> rngs;
    rngs.reserve(81);
    for (int s = 0; s < 81; ++s) rngs.push_back(rng.split(1000 + s));
    parallel_for(81, default_threads(), [&](std::size_t s) {
        const int sa = static_cast<int>(s) / 9, sb = static_cast<int>(s) % 9;
        Circuit c = backend.apply_noise(prep);
        c.add(Gate::custom({0}, Mat(gates[sa].adjoint())));
        c.add(Gate::custom({1}, Mat(gates[sb].adjoint())));
        Backend plain;  // measurement rotations are treated as ideal
        counts[s] = plain.sample(c, shots_per_setting, rngs[s]);
    });
    return state_mle(counts, opts);
}

double state_fidelity(const Mat& rho, const Vec& target) {
    return std::real((target.adjoint() * rho * target)(0, 0)) / target.squaredNorm();
}

RMat choi_to_ptm(const Mat& choi) {
    const auto& basis = ptm_basis(2);
    RMat ptm(81, 81);
    for (int b = 0; b < 81; ++b) {
        // E(B) = Tr_in[(B^T (x) I) J] with J on input (x) output
        Mat image = Mat::Zero(9, 9);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) {
                const cxd w = basis[b](j, i);  // (B^T)_{ij}
                if (w == cxd(0, 0)) continue;
                image += w * choi.block(j * 9, i * 9, 9, 9);
            }
        for (int a = 0; a < 81; ++a)
            ptm(a, b) = std::real(basis[a].cwiseProduct(image.conjugate()).sum());
    }
    return ptm;
}

namespace {

double loglik_process(const Mat& choi, const std::vector<std::vector<std::vector<int>>>& counts,
                      std::vector<Mat>* outputs_cache) {
    const auto& preps = prep_table();
    const auto& povm = povm_table();
    double ll = 0.0;
    for (int i = 0; i < 81; ++i) {
        // E(rho) = sum_{ik} rho_{ik} J_block(i,k)
        Mat out = Mat::Zero(9, 9);
        const Mat& rho = preps[i];
        for (int a = 0; a < 9; ++a)
            for (int bcol = 0; bcol < 9; ++bcol) {
                const cxd w = rho(a, bcol);
                if (w == cxd(0, 0)) continue;
                out += w * choi.block(a * 9, bcol * 9, 9, 9);
            }
        if (outputs_cache) (*outputs_cache)[i] = out;
        for (int s = 0; s < 81; ++s)
            for (int o = 0; o < 9; ++o) {
                const int n = counts[i][s][o];
                if (n == 0) continue;
                const double p =
                    std::max(1e-14, std::real(povm.at(s, o).cwiseProduct(out.conjugate()).sum()));
                ll += n * std::log(p);
            }
    }
    return ll;
}

Mat tp_project(const Mat& choi) {
    // orthogonal projection onto Tr_out J = I on the input (x) output layout
    Mat j = choi;
    Mat marg = Mat::Zero(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k) marg(i, k) = j.block(i * 9, k * 9, 9, 9).trace();
    const Mat delta = marg - Mat::Identity(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k)
            j.block(i * 9, k * 9, 9, 9) -= delta(i, k) / 9.0 * Mat::Identity(9, 9);
    return j;
}

Mat cptp_project(Mat j, int sweeps = 20, double tol = 1e-9) {
    for (int s = 0; s < sweeps; ++s) {
        j = tp_project(j);
        const Mat p = psd_project(j);
        if ((p - j).cwiseAbs().maxCoeff() < tol) return tp_project(p);
        j = p;
    }
    return tp_project(j);
}

/// exact trace-preserving renormalization of a PSD Choi candidate:
/// J' = (M^{-1/2} (x) I) J (M^{-1/2} (x) I) with M = Tr_out J
Mat tp_normalize(const Mat& j) {
    Mat marg = Mat::Zero(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k) marg(i, k) = j.block(i * 9, k * 9, 9, 9).trace();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (marg + marg.adjoint()));
    const RVec vals = es.eigenvalues().cwiseMax(1e-14);
    Mat inv_sqrt = es.eigenvectors() *
                   vals.cwiseInverse().cwiseSqrt().asDiagonal().toDenseMatrix().cast<cxd>() *
                   es.eigenvectors().adjoint();
    const Mat lambda = kron(inv_sqrt, Mat::Identity(9, 9));
    return lambda * j * lambda;
}

}  // namespace

ReconstructionResult process_mle(const std::vector<std::vector<std::vector<int>>>& counts,
                                 const MleOptions& opts) {
    if (counts.size() != 81) throw std::invalid_argument("process_mle: need 81 preparations");
    long long total = 0;
    for (const auto& per_prep : counts)
        for (const auto& per_setting : per_prep)
            for (int n : per_setting) total += n;
    if (total < 81LL * 81LL * opts.shots_floor)
        throw std::invalid_argument("process_mle: insufficient counts (< 10 per setting)");

    const auto& preps = prep_table();
    const auto& povm = povm_table();

    // fully depolarizing start: full-rank Choi so the multiplicative update
    // can reach any channel support
    Mat choi = Mat::Identity(81, 81) / 9.0;

    ReconstructionResult res;
    std::vector<Mat> outputs(81);
    double ll = loglik_process(choi, counts, &outputs);
    res.loglik_trace.push_back(ll);

    for (int it = 0; it < opts.max_iterations; ++it) {
        // R in Choi space: sum over data of (n/p) rho_i^T (x) Pi_{s,o}
        Mat r = Mat::Zero(81, 81);
        for (int i = 0; i < 81; ++i) {
            Mat m = Mat::Zero(9, 9);
            for (int s = 0; s < 81; ++s)
                for (int o = 0; o < 9; ++o) {
                    const int n = counts[i][s][o];
                    if (n == 0) continue;
                    const double p = std::max(
                        1e-14, std::real(povm.at(s, o).cwiseProduct(outputs[i].conjugate()).sum()));
                    m += (static_cast<double>(n) / p) * povm.at(s, o);
                }
            // R = sum (n/p) (rho^T (x) Pi): block (a,b) carries rho_{ba} Pi
            for (int a = 0; a < 9; ++a)
                for (int b = 0; b < 9; ++b) {
                    const cxd w = preps[i](b, a);
                    if (w == cxd(0, 0)) continue;
                    r.block(a * 9, b * 9, 9, 9) += w * m;
                }
        }
        // normalize so r ~ identity at the fixed point; the TP projection is
        // affine, an unnormalized update would let the scale run away
        r *= 81.0 / std::abs(r.trace());

        double step = 1.0;
        Mat best = choi;
        double best_ll = ll;
        bool improved = false;
        for (int halve = 0; halve < 14; ++halve) {
            const Mat g = (1.0 - step) * Mat::Identity(81, 81) + step * r;
            // congruence keeps the candidate PSD; the Lagrange factor makes it
            // exactly trace preserving, so likelihoods stay comparable
            const Mat cand = tp_normalize(g * choi * g.adjoint());
            std::vector<Mat> cand_out(81);
            const double cand_ll = loglik_process(cand, counts, &cand_out);
            if (cand_ll > best_ll) {
                best = cand;
                best_ll = cand_ll;
                outputs = cand_out;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        res.iterations = it + 1;
        if (!improved) {
            res.converged = true;
            break;
        }
        const double gain = best_ll - ll;
        choi = best;
        ll = best_ll;
        res.loglik_trace.push_back(ll);
        if (std::abs(gain) <= opts.rel_tol * std::abs(ll)) {
            res.converged = true;
            break;
        }
    }
    res.estimate = choi;
    res.ptm = choi_to_ptm(choi);
    Eigen::SelfAdjointEigenSolver<Mat> es(choi);
    res.min_eigenvalue = es.eigenvalues().minCoeff();
    Mat marg = Mat::Zero(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int k = 0; k < 9; ++k) marg(i, k) = choi.block(i * 9, k * 9, 9, 9).trace();
    res.trace_error = (marg - Mat::Identity(9, 9)).cwiseAbs().maxCoeff();
    return res;
}

ReconstructionResult process_tomography(const Circuit& gate, const Backend& backend,
                                        int shots_per_setting, Rng& rng, const MleOptions& opts) {
    const auto& gates = setting_gates();
    std::vector<std::vector<std::vector<int>>> counts(
        81, std::vector<std::vector<int>>(81));
    std::vector<Rng> rngs;
    rngs.reserve(81 * 81);
    for (int t = 0; t < 81 * 81; ++t) rngs.push_back(rng.split(20000 + t));
    parallel_for(81 * 81, default_threads(), [&](std::size_t t) {
        const int i = static_cast<int>(t) / 81, s = static_cast<int>(t) % 81;
        Circuit c(2);
        c.add(Gate::custom({0}, gates[i / 9]));
        c.add(Gate::custom({1}, gates[i % 9]));
        for (const auto& g : backend.apply_noise(gate).ops) c.ops.push_back(g);
        c.add(Gate::custom({0}, Mat(gates[s / 9].adjoint())));
        c.add(Gate::custom({1}, Mat(gates[s % 9].adjoint())));
        Backend plain;
        counts[i][s] = plain.sample(c, shots_per_setting, rngs[t]);
    });
    return process_mle(counts, opts);
}

double process_fidelity(const RMat& e_exp, const RMat& e_ideal) {
    if (e_exp.rows() != e_ideal.rows() || e_exp.cols() != e_ideal.cols())
        throw std::invalid_argument("process_fidelity: dimension mismatch");
    const double d2 = static_cast<double>(e_exp.rows());
    return (e_ideal.transpose() * e_exp).trace() / d2;
}

}  // namespace tomo
}  // namespace qkt
