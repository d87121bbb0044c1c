#include "qkt/xeb.hpp"

#include <stdexcept>

#include "qkt/parallel.hpp"
#include "qkt/randomu.hpp"

namespace qkt {
namespace xeb {

XEBCircuit xeb_circuit(GateKind gate, int depth, Rng& rng) {
    if (depth < 0) throw std::invalid_argument("xeb_circuit: depth must be >= 0");
    XEBCircuit out;
    out.circuit = Circuit(2);
    out.circuit.label = "xeb";
    for (int m = 0; m < depth; ++m) {
        out.circuit.add(Gate::custom({0}, haar_su3(rng)));
        out.circuit.add(Gate::custom({1}, haar_su3(rng)));
        out.circuit.add(Gate::fixed(gate, {0, 1}));
    }
    Backend ideal;
    out.ideal = ideal.probabilities(out.circuit);
    return out;
}

double linear_cross_entropy(const RVec& p1, const RVec& p2) {
    if (p1.size() != p2.size()) throw std::invalid_argument("linear_cross_entropy: size mismatch");
    return p1.dot(p2);
}

double f_xeb(const RVec& p_ideal, const RVec& q_measured) {
    const RVec u = RVec::Constant(p_ideal.size(), 1.0 / p_ideal.size());
    const double hpu = linear_cross_entropy(p_ideal, u);
    const double hpp = linear_cross_entropy(p_ideal, p_ideal);
    if (std::abs(hpp - hpu) < 1e-14)
        throw std::invalid_argument("f_xeb: ideal distribution is uniform");
    return (linear_cross_entropy(p_ideal, q_measured) - hpu) / (hpp - hpu);
}

double speckle_purity(const std::vector<double>& probs, int shots) {
    if (probs.size() < 10) throw std::invalid_argument("speckle_purity: need >= 10 samples");
    constexpr double d = 9.0;
    double var = sample_variance(probs);
    if (shots > 1) {
        // unbiased removal of the multinomial sampling variance
        double shot = 0.0;
        for (double p : probs) shot += p * (1.0 - p) / (shots - 1);
        var -= shot / probs.size();
    }
    return var * d * d * (d + 1.0) / (d - 1.0);
}

XEBResult run_xeb(const XEBConfig& config, const Backend& backend, Rng& rng) {
    if (config.n_random < 10)
        throw std::invalid_argument("run_xeb: need >= 10 circuits per depth");
    const int n_d = static_cast<int>(config.depths.size());
    XEBResult res;
    res.depths = config.depths;
    res.ideal_probs.assign(n_d, std::vector<RVec>(config.n_random));
    res.counts.assign(n_d, std::vector<std::vector<int>>(config.n_random));

    parallel_for(static_cast<std::size_t>(n_d) * config.n_random, default_threads(),
                 [&](std::size_t t) {
                     const int di = static_cast<int>(t) / config.n_random;
                     const int r = static_cast<int>(t) % config.n_random;
                     Rng crng = rng.split(t * 2 + 11);
                     auto xc = xeb_circuit(config.gate, config.depths[di], crng);
                     res.ideal_probs[di][r] = xc.ideal;
                     res.counts[di][r] = backend.sample(xc.circuit, config.shots, crng);
                 });

    // per-depth fidelity: through-origin slope of measured vs ideal entropy gaps
    std::vector<double> mdep, fdep;
    for (int di = 0; di < n_d; ++di) {
        std::vector<double> x, y;
        for (int r = 0; r < config.n_random; ++r) {
            const RVec& p = res.ideal_probs[di][r];
            RVec q(9);
            for (int o = 0; o < 9; ++o) q(o) = static_cast<double>(res.counts[di][r][o]) / config.shots;
            const RVec u = RVec::Constant(9, 1.0 / 9.0);
            const double hpu = linear_cross_entropy(p, u);
            x.push_back(linear_cross_entropy(p, p) - hpu);
            y.push_back(linear_cross_entropy(p, q) - hpu);
        }
        const auto fit = origin_fit(x, y);
        res.fidelity_per_depth.push_back(fit.slope);
        mdep.push_back(config.depths[di]);
        fdep.push_back(fit.slope);

        // speckle purity averaged over the 9 tritstrings, jackknife bars
        std::vector<std::vector<double>> per_trit(9, std::vector<double>(config.n_random));
        for (int r = 0; r < config.n_random; ++r)
            for (int o = 0; o < 9; ++o)
                per_trit[o][r] = static_cast<double>(res.counts[di][r][o]) / config.shots;
        SpecklePoint sp;
        double acc = 0.0;
        for (int o = 0; o < 9; ++o) acc += speckle_purity(per_trit[o], config.shots);
        sp.purity = acc / 9.0;
        sp.stderr_p = jackknife_stderr(config.n_random, [&](std::size_t skip) {
            double a = 0.0;
            for (int o = 0; o < 9; ++o) {
                std::vector<double> v;
                v.reserve(config.n_random - 1);
                for (int r = 0; r < config.n_random; ++r)
                    if (r != static_cast<int>(skip)) v.push_back(per_trit[o][r]);
                a += speckle_purity(v, config.shots);
            }
            return a / 9.0;
        });
        res.speckle_per_depth.push_back(sp);
    }

    const auto decay = fit_exp_decay(mdep, fdep);
    res.cycle_fidelity = decay.rate;
    res.cycle_fidelity_stderr = decay.rate_stderr;

    std::vector<double> gvals;
    for (const auto& sp : res.speckle_per_depth) gvals.push_back(std::max(sp.purity, 0.0));
    const auto gdecay = fit_exp_decay(mdep, gvals);
    res.purity_limit = std::sqrt(std::clamp(gdecay.rate, 0.0, 1.2));
    return res;
}

PorterThomasResult porter_thomas_test(const std::vector<double>& probs, double alpha) {
    if (probs.size() < 100) throw std::invalid_argument("porter_thomas_test: need >= 100 samples");
    PorterThomasResult r;
    const auto ks = ks_test(std::vector<double>(probs), &porter_thomas_cdf);
    r.ks_statistic = ks.statistic;
    r.p_value = ks.p_value;
    r.pass = ks.p_value > alpha;
    double spread = 0.0;
    for (double p : probs) spread = std::max(spread, std::abs(p - 1.0 / 9.0));
    r.uniform_spread = spread;
    r.uniform_limit = spread < 0.02;
    return r;
}

}  // namespace xeb
}  // namespace qkt
