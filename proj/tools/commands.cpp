#include "commands.hpp"

#include <chrono>

#include "qkt/calibrate.hpp"
#include "qkt/cb.hpp"
#include "qkt/config.hpp"
#include "qkt/tomography.hpp"
#include "qkt/xeb.hpp"

namespace qkt {
namespace cli {

namespace {

constexpr double kTwoPi = 2.0 * pi;

json alpha_json(const AlphaRates& a) {
    // external interface carries Hz
    return json{{"a11", a.a11 / kTwoPi},
                {"a12", a.a12 / kTwoPi},
                {"a21", a.a21 / kTwoPi},
                {"a22", a.a22 / kTwoPi}};
}

RMat ideal_ptm(TwoQutritTarget t) { return unitary_to_ptm(target_unitary(t)); }

}  // namespace

void write_manifest(const RunContext& ctx, const json& config_echo) {
    json m;
    m["command"] = ctx.command;
    m["seed"] = ctx.seed;
    m["threads"] = ctx.threads;
    m["config"] = config_echo;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    m["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    write_text_file(ctx.out_dir / "manifest.json", m.dump(2));
}

int cmd_sweep_alpha(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_sweep_alpha(cfg);
    write_manifest(ctx, cfg);

    CsvWriter csv({"axis_value", "a11_hz", "a12_hz", "a21_hz", "a22_hz", "method", "flag"});
    json points = json::array();
    for (int i = 0; i < c.points; ++i) {
        const double x = c.start + (c.stop - c.start) * i / (c.points - 1.0);
        DriveParams drv = c.drive;
        if (c.axis == "phase") drv.phi = x;
        if (c.axis == "amplitude") drv.amp_c = drv.amp_t = x * kTwoPi;
        if (c.axis == "frequency") drv.omega_d = x * kTwoPi;

        std::string flag = "ok";
        AlphaRates total{};
        bool have = false;
        if (c.method == "perturbative") {
            try {
                total = alpha_static(c.device) + alpha_driven(c.device, drv);
                have = true;
            } catch (const PoleError&) {
                flag = "pole";
            }
        } else {
            PropagateOptions opts;
            opts.richardson_check = false;
            try {
                const auto fit = measure_alpha_propagated(c.device, drv, c.durations, 20e-9, opts);
                total = fit.rates;
                have = true;
                if (c.axis == "frequency") {
                    const double biggest =
                        std::max({std::abs(total.a11), std::abs(total.a12), std::abs(total.a21),
                                  std::abs(total.a22)});
                    if (biggest > c.clip_hz * kTwoPi) {
                        have = false;
                        flag = "clipped";
                    }
                }
            } catch (const std::exception&) {
                flag = "unresolved";
            }
        }
        if (have) {
            csv.add_row_mixed({format_double(x), format_double(total.a11 / kTwoPi),
                               format_double(total.a12 / kTwoPi), format_double(total.a21 / kTwoPi),
                               format_double(total.a22 / kTwoPi), c.method, flag});
            points.push_back(json{{"axis_value", x}, {"alpha", alpha_json(total)}, {"flag", flag}});
        } else {
            csv.add_row_mixed({format_double(x), "", "", "", "", c.method, flag});
            points.push_back(json{{"axis_value", x}, {"alpha", nullptr}, {"flag", flag}});
        }
    }
    csv.save(ctx.out_dir / "sweep_alpha.csv");
    json report;
    report["command"] = "sweep-alpha";
    report["seed"] = ctx.seed;
    report["axis"] = c.axis;
    report["method"] = c.method;
    report["points"] = std::move(points);
    write_text_file(ctx.out_dir / "report.json", report.dump(2));
    return 0;
}

int cmd_calibrate(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_calibrate(cfg);
    write_manifest(ctx, cfg);

    const auto rep = calibrate_gate(c.device, c.target, c.search);
    write_text_file(ctx.out_dir / "schedule.json", rep.schedule.to_json());

    json report;
    report["command"] = "calibrate";
    report["seed"] = ctx.seed;
    report["target"] = rep.target_name;
    report["device"] = c.device.name;
    report["noiseless_fidelity"] = rep.fidelity;
    report["gate_time_s"] = rep.gate_time;
    report["leakage"] = rep.leakage;
    report["converged"] = rep.converged;
    report["propagations"] = rep.propagations;
    if (c.decoherent_report) {
        PropagateOptions opts;
        opts.decoherence = true;
        opts.richardson_check = false;
        const auto prop = propagate(c.device, rep.schedule, opts);
        const RMat ptm = channel_to_ptm(prop.channel());
        report["decoherent_fidelity"] = tomo::process_fidelity(ptm, ideal_ptm(c.target));
    }
    write_text_file(ctx.out_dir / "report.json", report.dump(2));
    if (!rep.converged) return 3;
    return 0;
}

int cmd_cb(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_cb(cfg);
    write_manifest(ctx, cfg);

    Backend backend;
    backend.noise = c.noise;
    Rng rng(ctx.seed);
    const auto res = cb::run_cb(c.cb, backend, rng);

    json report;
    report["command"] = "cb";
    report["seed"] = ctx.seed;
    report["cycle"] = c.cycle_name;
    report["composite_fidelity"] = res.composite_fidelity;
    report["composite_stderr"] = res.composite_stderr;
    report["depths"] = res.depths;
    report["shots"] = res.shots;
    report["n_randomizations"] = c.cb.n_randomizations;
    json records = json::array();
    for (const auto& r : res.records) {
        records.push_back(json{{"x", r.channel.x},
                               {"z", r.channel.z},
                               {"amplitude", r.amplitude},
                               {"decay", r.decay},
                               {"stderr", r.decay_stderr},
                               {"ok", r.ok}});
    }
    report["records"] = std::move(records);
    try {
        const auto uni = cb::unitarity_from_cb_variance(res);
        report["unitarity"] = uni.u;
        report["unitarity_stderr"] = uni.stderr_u;
    } catch (const std::exception& e) {
        report["unitarity"] = nullptr;
        report["unitarity_note"] = e.what();
    }
    write_text_file(ctx.out_dir / "report.json", report.dump(2));

    // integrated histogram of per-channel fidelities
    std::vector<double> decays;
    for (const auto& r : res.records)
        if (r.ok) decays.push_back(r.decay);
    std::sort(decays.begin(), decays.end());
    CsvWriter csv({"decay", "integrated_fraction"});
    for (std::size_t i = 0; i < decays.size(); ++i)
        csv.add_row({decays[i], static_cast<double>(i + 1) / decays.size()});
    csv.save(ctx.out_dir / "cb_integrated_histogram.csv");
    return 0;
}

int cmd_xeb(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_xeb(cfg);
    write_manifest(ctx, cfg);

    Backend backend;
    backend.noise = c.noise;
    Rng rng(ctx.seed);
    const auto res = xeb::run_xeb(c.xeb, backend, rng);

    json report;
    report["command"] = "xeb";
    report["seed"] = ctx.seed;
    report["gate"] = gate_kind_name(c.xeb.gate);
    report["depths"] = res.depths;
    report["cycle_fidelity"] = res.cycle_fidelity;
    report["cycle_fidelity_stderr"] = res.cycle_fidelity_stderr;
    report["purity_limit"] = res.purity_limit;
    report["fidelity_per_depth"] = res.fidelity_per_depth;
    json speckle = json::array();
    for (const auto& s : res.speckle_per_depth)
        speckle.push_back(json{{"purity", s.purity}, {"stderr", s.stderr_p}});
    report["speckle_per_depth"] = std::move(speckle);
    json raw = json::array();
    for (std::size_t di = 0; di < res.depths.size(); ++di) {
        json per_depth = json::array();
        for (std::size_t r = 0; r < res.ideal_probs[di].size(); ++r) {
            json rec;
            rec["ideal"] = std::vector<double>(res.ideal_probs[di][r].data(),
                                               res.ideal_probs[di][r].data() + 9);
            rec["counts"] = res.counts[di][r];
            per_depth.push_back(std::move(rec));
        }
        raw.push_back(std::move(per_depth));
    }
    report["raw"] = std::move(raw);
    write_text_file(ctx.out_dir / "report.json", report.dump(2));

    CsvWriter scatter({"depth", "circuit", "ideal_minus_uniform", "measured_minus_uniform"});
    for (std::size_t di = 0; di < res.depths.size(); ++di)
        for (std::size_t r = 0; r < res.ideal_probs[di].size(); ++r) {
            const RVec& p = res.ideal_probs[di][r];
            RVec q(9);
            for (int o = 0; o < 9; ++o)
                q(o) = static_cast<double>(res.counts[di][r][o]) / c.xeb.shots;
            const RVec u = RVec::Constant(9, 1.0 / 9.0);
            scatter.add_row({static_cast<double>(res.depths[di]), static_cast<double>(r),
                             xeb::linear_cross_entropy(p, p) - xeb::linear_cross_entropy(p, u),
                             xeb::linear_cross_entropy(p, q) - xeb::linear_cross_entropy(p, u)});
        }
    scatter.save(ctx.out_dir / "xeb_scatter.csv");

    CsvWriter per_depth({"depth", "fidelity", "speckle_purity", "speckle_stderr"});
    for (std::size_t di = 0; di < res.depths.size(); ++di)
        per_depth.add_row({static_cast<double>(res.depths[di]), res.fidelity_per_depth[di],
                           res.speckle_per_depth[di].purity, res.speckle_per_depth[di].stderr_p});
    per_depth.save(ctx.out_dir / "xeb_per_depth.csv");
    return 0;
}

int cmd_tomography(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_tomography(cfg);
    write_manifest(ctx, cfg);

    Backend backend;
    backend.noise = c.noise;
    Rng rng(ctx.seed);
    const Circuit circ = config::named_circuit(c.circuit);

    json report;
    report["command"] = "tomography";
    report["seed"] = ctx.seed;
    report["mode"] = c.mode;
    report["circuit"] = c.circuit;
    report["shots_per_setting"] = c.shots;

    if (c.mode == "state") {
        const auto rec = tomo::state_tomography(circ, backend, c.shots, rng);
        report["estimate"] = matrix_to_json(rec.estimate);
        report["iterations"] = rec.iterations;
        report["converged"] = rec.converged;
        report["min_eigenvalue"] = rec.min_eigenvalue;
        report["trace_error"] = rec.trace_error;
        report["loglik_final"] = rec.loglik_trace.back();
        if (c.circuit == "bell") {
            Vec bell = Vec::Zero(9);
            bell(0) = bell(4) = bell(8) = 1.0 / std::sqrt(3.0);
            report["fidelity_to_bell"] = tomo::state_fidelity(rec.estimate, bell);
        }
    } else {
        const auto rec = tomo::process_tomography(circ, backend, c.shots, rng);
        report["ptm"] = rmatrix_to_json(rec.ptm);
        report["iterations"] = rec.iterations;
        report["converged"] = rec.converged;
        report["choi_min_eigenvalue"] = rec.min_eigenvalue;
        report["tp_error"] = rec.trace_error;
        report["loglik_final"] = rec.loglik_trace.back();
        if (c.circuit == "cz" || c.circuit == "czdag") {
            const auto t = config::parse_target_name(c.circuit);
            report["process_fidelity_to_ideal"] = tomo::process_fidelity(rec.ptm, ideal_ptm(t));
        } else if (c.circuit == "identity") {
            report["process_fidelity_to_ideal"] =
                tomo::process_fidelity(rec.ptm, RMat::Identity(81, 81));
        }
    }
    write_text_file(ctx.out_dir / "report.json", report.dump(2));
    return 0;
}

int cmd_synthesize(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_synthesize(cfg);
    write_manifest(ctx, cfg);

    Rng rng(ctx.seed);
    synth::CoverageOptions opts = c.coverage;
    opts.threads = ctx.threads;
    const auto res = synth::coverage_study(c.gate, c.targets, c.n_targets, c.max_depth, rng, opts);

    json report;
    report["command"] = "synthesize";
    report["seed"] = ctx.seed;
    report["gate"] = gate_kind_name(c.gate);
    report["targets"] = (c.targets == synth::TargetClass::Haar) ? "haar" : "clifford";
    report["n_targets"] = c.n_targets;
    report["max_depth"] = c.max_depth;
    report["success_rate"] = res.success_rate;
    report["first_success_depth"] = res.first_success_depth;
    write_text_file(ctx.out_dir / "report.json", report.dump(2));

    CsvWriter rate({"depth", "success_rate"});
    for (std::size_t d = 0; d < res.success_rate.size(); ++d)
        rate.add_row({static_cast<double>(d), res.success_rate[d]});
    rate.save(ctx.out_dir / "synthesis_success.csv");

    CsvWriter table({"target", "depth", "infidelity"});
    for (std::size_t t = 0; t < res.infidelity_table.size(); ++t)
        for (std::size_t d = 0; d < res.infidelity_table[t].size(); ++d)
            table.add_row({static_cast<double>(t), static_cast<double>(d),
                           res.infidelity_table[t][d]});
    table.save(ctx.out_dir / "synthesis_infidelity.csv");
    return 0;
}

int cmd_verify(const json& cfg, const RunContext& ctx) {
    const auto c = config::parse_verify(cfg);
    write_manifest(ctx, cfg);

    const auto sched = PulseSchedule::from_json(read_text_file(c.schedule_file));
    PropagateOptions opts;
    opts.richardson_check = false;
    const auto prop = propagate(c.device, sched, opts);
    const Mat targ = target_unitary(c.target);
    const double fid = gate_fidelity(prop.unitary, targ);

    Mat power = Mat::Identity(9, 9);
    for (int k = 0; k < c.repetitions; ++k) power = prop.unitary * power;
    Mat ideal_power = Mat::Identity(9, 9);
    for (int k = 0; k < c.repetitions; ++k) ideal_power = targ * ideal_power;
    const double fid_rep = gate_fidelity(power, ideal_power);

    json report;
    report["command"] = "verify";
    report["seed"] = ctx.seed;
    report["target"] = (c.target == TwoQutritTarget::CZ) ? "cz" : "czdag";
    report["single_gate_fidelity"] = fid;
    report["repetitions"] = c.repetitions;
    report["repeated_fidelity"] = fid_rep;
    report["repetition_check_ok"] = (1.0 - fid_rep) <= std::max(1e-9, 3.0 * (1.0 - fid));
    write_text_file(ctx.out_dir / "report.json", report.dump(2));
    return 0;
}

}  // namespace cli
}  // namespace qkt
