#include "qkt/synthesis.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <array>
#include <stdexcept>

#include "qkt/algebra.hpp"
#include "qkt/parallel.hpp"
#include "qkt/randomu.hpp"

namespace qkt {
namespace synth {

namespace {

const std::array<Mat, 8>& lambdas() {
    static const std::array<Mat, 8> l = [] {
        std::array<Mat, 8> t;
        for (int k = 0; k < 8; ++k) t[k] = gellmann_matrix(k + 1);
        return t;
    }();
    return l;
}

struct LocalFactor {
    Mat u;                       // exp(-i H)
    Eigen::Matrix3cd q;          // eigenvectors of H
    Eigen::Vector3d d;           // eigenvalues
    std::array<Eigen::Matrix3cd, 8> e_tilde;  // Q^dag lambda_k Q
};

LocalFactor local_factor(const double* theta) {
    Mat h = Mat::Zero(3, 3);
    for (int k = 0; k < 8; ++k) h += theta[k] * lambdas()[k];
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    LocalFactor f;
    f.q = es.eigenvectors();
    f.d = es.eigenvalues();
    const Vec phases = (-im * f.d.array().cast<cxd>()).exp().matrix();
    f.u = f.q * phases.asDiagonal() * f.q.adjoint();
    for (int k = 0; k < 8; ++k) f.e_tilde[k] = f.q.adjoint() * lambdas()[k] * f.q;
    return f;
}

/// Frechet derivative of exp(-iH) along lambda_k via divided differences
Mat frechet(const LocalFactor& f, int k) {
    Eigen::Matrix3cd phi;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double da = f.d(a), db = f.d(b);
            if (std::abs(da - db) < 1e-9) {
                phi(a, b) = -im * std::exp(-im * 0.5 * (da + db));
            } else {
                phi(a, b) = (std::exp(-im * da) - std::exp(-im * db)) / (da - db);
            }
        }
    return f.q * phi.cwiseProduct(f.e_tilde[k]) * f.q.adjoint();
}

struct Evaluated {
    std::vector<LocalFactor> fa, fb;  // per layer, qutrit a and b
    std::vector<Mat> layers;          // L_k = A_k (x) B_k
    Mat v;                            // full ansatz unitary
};

Evaluated forward(const Ansatz& ansatz, const std::vector<double>& params, const Mat& gate) {
    Evaluated ev;
    const int nl = ansatz.depth + 1;
    ev.fa.reserve(nl);
    ev.fb.reserve(nl);
    ev.layers.reserve(nl);
    for (int k = 0; k < nl; ++k) {
        ev.fa.push_back(local_factor(&params[16 * k]));
        ev.fb.push_back(local_factor(&params[16 * k + 8]));
        ev.layers.push_back(kron(ev.fa[k].u, ev.fb[k].u));
    }
    Mat v = ev.layers[0];
    for (int k = 1; k < nl; ++k) v = ev.layers[k] * gate * v;
    ev.v = v;
    return ev;
}

}  // namespace

int gate_order(GateKind gate) {
    const Mat g = native_gate_matrix(gate);
    Mat p = g;
    for (int k = 1; k <= 8; ++k) {
        if (phase_aligned_dist(p, Mat::Identity(9, 9)) < 1e-10) return k;
        p = g * p;
    }
    return 0;
}

Mat ansatz_unitary(const Ansatz& ansatz, const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != ansatz.n_params())
        throw std::invalid_argument("ansatz_unitary: wrong parameter count");
    const Mat gate = native_gate_matrix(ansatz.two_qutrit_gate);
    return forward(ansatz, params, gate).v;
}

double infidelity(const Ansatz& ansatz, const std::vector<double>& params, const Mat& target) {
    const Mat v = ansatz_unitary(ansatz, params);
    return 1.0 - std::norm((v.adjoint() * target).trace()) / 81.0;
}

double infidelity_grad(const Ansatz& ansatz, const std::vector<double>& params, const Mat& target,
                       std::vector<double>& grad_out) {
    const Mat gate = native_gate_matrix(ansatz.two_qutrit_gate);
    const int nl = ansatz.depth + 1;
    const auto ev = forward(ansatz, params, gate);

    const cxd s = (target.adjoint() * ev.v).trace();  // S = tr(U^dag V)
    const double cost = 1.0 - std::norm(s) / 81.0;

    // prefixes P_k = L_m G ... G (left of layer k), suffixes S_k (right of it)
    std::vector<Mat> prefix(nl), suffix(nl);
    prefix[nl - 1] = Mat::Identity(9, 9);
    for (int k = nl - 2; k >= 0; --k) prefix[k] = (k + 1 == nl - 1 ? ev.layers[nl - 1] : prefix[k + 1] * ev.layers[k + 1]) * gate;
    suffix[0] = Mat::Identity(9, 9);
    for (int k = 1; k < nl; ++k) suffix[k] = gate * (k - 1 == 0 ? ev.layers[0] : ev.layers[k - 1] * suffix[k - 1]);

    grad_out.assign(ansatz.n_params(), 0.0);
    for (int k = 0; k < nl; ++k) {
        // M = Suffix_k U^dag Prefix_k so that dS = tr(M dL_k)
        const Mat m = suffix[k] * target.adjoint() * prefix[k];
        // partial contractions against the partner factor
        Eigen::Matrix3cd ta = Eigen::Matrix3cd::Zero(), tb = Eigen::Matrix3cd::Zero();
        const Mat& a = ev.fa[k].u;
        const Mat& b = ev.fb[k].u;
        for (int i = 0; i < 3; ++i)
            for (int ip = 0; ip < 3; ++ip) {
                cxd acca(0, 0);
                for (int jj = 0; jj < 3; ++jj)
                    for (int jp = 0; jp < 3; ++jp) acca += m(3 * i + jj, 3 * ip + jp) * b(jp, jj);
                ta(i, ip) = acca;
                cxd accb(0, 0);
                for (int jj = 0; jj < 3; ++jj)
                    for (int jp = 0; jp < 3; ++jp) accb += m(3 * jj + i, 3 * jp + ip) * a(jp, jj);
                tb(i, ip) = accb;
            }
        for (int p = 0; p < 8; ++p) {
            const cxd ds_a = (frechet(ev.fa[k], p) * ta).trace();
            const cxd ds_b = (frechet(ev.fb[k], p) * tb).trace();
            grad_out[16 * k + p] = -2.0 * std::real(std::conj(s) * ds_a) / 81.0;
            grad_out[16 * k + 8 + p] = -2.0 * std::real(std::conj(s) * ds_b) / 81.0;
        }
    }
    return cost;
}

namespace {

struct BfgsProblem {
    const Ansatz* ansatz;
    const Mat* target;
    std::vector<double> x_tmp, g_tmp;
};

void load_x(const gsl_vector* v, std::vector<double>& x) {
    x.resize(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
}

double bfgs_f(const gsl_vector* v, void* params) {
    auto* p = static_cast<BfgsProblem*>(params);
    load_x(v, p->x_tmp);
    return infidelity(*p->ansatz, p->x_tmp, *p->target);
}

void bfgs_df(const gsl_vector* v, void* params, gsl_vector* g) {
    auto* p = static_cast<BfgsProblem*>(params);
    load_x(v, p->x_tmp);
    infidelity_grad(*p->ansatz, p->x_tmp, *p->target, p->g_tmp);
    for (std::size_t i = 0; i < p->g_tmp.size(); ++i) gsl_vector_set(g, i, p->g_tmp[i]);
}

void bfgs_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* g) {
    auto* p = static_cast<BfgsProblem*>(params);
    load_x(v, p->x_tmp);
    *f = infidelity_grad(*p->ansatz, p->x_tmp, *p->target, p->g_tmp);
    for (std::size_t i = 0; i < p->g_tmp.size(); ++i) gsl_vector_set(g, i, p->g_tmp[i]);
}

/// single BFGS run from x0, returns final infidelity and parameters
double bfgs_run(const Ansatz& ansatz, const Mat& target, std::vector<double>& x, int max_iters) {
    gsl_set_error_handler_off();
    BfgsProblem prob{&ansatz, &target, {}, {}};
    gsl_multimin_function_fdf func;
    func.n = x.size();
    func.f = &bfgs_f;
    func.df = &bfgs_df;
    func.fdf = &bfgs_fdf;
    func.params = &prob;

    gsl_vector* gx = gsl_vector_alloc(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) gsl_vector_set(gx, i, x[i]);
    gsl_multimin_fdfminimizer* m =
        gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, x.size());
    gsl_multimin_fdfminimizer_set(m, &func, gx, 0.2, 0.1);

    double best = m->f;
    for (int it = 0; it < max_iters; ++it) {
        const int status = gsl_multimin_fdfminimizer_iterate(m);
        if (m->f < best) best = m->f;
        if (status == GSL_ENOPROG) {
            // one restart of the internal state sometimes recovers progress
            gsl_multimin_fdfminimizer_restart(m);
            if (gsl_multimin_fdfminimizer_iterate(m) == GSL_ENOPROG) break;
        }
        if (gsl_multimin_test_gradient(m->gradient, 1e-12) == GSL_SUCCESS) break;
        if (m->f < 1e-13) break;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = gsl_vector_get(m->x, i);
    const double out = m->f;
    gsl_multimin_fdfminimizer_free(m);
    gsl_vector_free(gx);
    return out;
}

}  // namespace

SynthesisResult synthesize(const Mat& target, GateKind gate, int depth, Rng& rng,
                           const SynthesisOptions& opts) {
    if (target.rows() != 9 || target.cols() != 9)
        throw std::invalid_argument("synthesize: target must be 9x9");
    Ansatz ansatz{depth, gate};
    SynthesisResult res;
    for (int r = 0; r < opts.restarts; ++r) {
        Rng rrng = rng.split(r + 1);
        std::vector<double> x(ansatz.n_params());
        for (auto& v : x) v = rrng.uniform(-pi, pi);
        if (depth == 0 && r == 0) std::fill(x.begin(), x.end(), 0.0);  // identity start
        const double got = bfgs_run(ansatz, target, x, opts.max_iterations);
        ++res.restarts_used;
        if (got < res.achieved_infidelity) {
            res.achieved_infidelity = got;
            res.best_params = x;
        }
        if (res.achieved_infidelity < opts.tol) {
            res.converged = true;
            break;
        }
    }
    // recompute independently of the optimizer's bookkeeping
    if (!res.best_params.empty())
        res.achieved_infidelity = infidelity(ansatz, res.best_params, target);
    res.converged = res.achieved_infidelity < opts.tol;
    return res;
}

CoverageResult coverage_study(GateKind gate, TargetClass target_class, int n_targets,
                              int max_depth, Rng& rng, const CoverageOptions& opts) {
    if (n_targets < 1) throw std::invalid_argument("coverage_study: need targets");
    std::vector<Mat> targets;
    targets.reserve(n_targets);
    Rng trng = rng.split(0x7a96);
    for (int i = 0; i < n_targets; ++i) {
        Rng one = trng.split(i);
        targets.push_back(target_class == TargetClass::Haar ? haar_su9(one)
                                                            : random_clifford2(one).unitary);
    }

    CoverageResult res;
    res.first_success_depth.assign(n_targets, -1);
    res.infidelity_table.assign(n_targets, std::vector<double>(max_depth + 1, 1.0));

    parallel_for(n_targets, opts.threads > 0 ? opts.threads : default_threads(), [&](std::size_t ti) {
        Rng target_rng = rng.split(0xc0ffee + ti);
        for (int d = 0; d <= max_depth; ++d) {
            SynthesisOptions so = opts.synth;
            if (d == max_depth) so.restarts += opts.rescue_restarts;
            const auto r = synthesize(targets[ti], gate, d, target_rng, so);
            res.infidelity_table[ti][d] = r.achieved_infidelity;
            if (r.converged) {
                res.first_success_depth[ti] = d;
                break;
            }
        }
    });

    res.success_rate.assign(max_depth + 1, 0.0);
    for (int d = 0; d <= max_depth; ++d) {
        int ok = 0;
        for (int t = 0; t < n_targets; ++t)
            if (res.first_success_depth[t] >= 0 && res.first_success_depth[t] <= d) ++ok;
        res.success_rate[d] = static_cast<double>(ok) / n_targets;
    }
    return res;
}

}  // namespace synth
}  // namespace qkt
