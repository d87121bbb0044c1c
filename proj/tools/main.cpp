#include <CLI11.hpp>

#include <cstdio>
#include <thread>

#include "commands.hpp"
#include "qkt/config.hpp"
#include "qkt/parallel.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& args, bool config_required = true) {
    auto* c = sub->add_option("--config", args.config_path, "JSON config file");
    if (config_required) c->check(CLI::ExistingFile);
    sub->add_option("--preset", args.preset, "device preset shortcut (cz-pair | czdag-pair)");
    sub->add_option("--seed", args.seed, "master seed");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--threads", args.threads, "worker pool size (0 = machine parallelism)");
}

qkt::json load_config(const CommonArgs& args, const std::string& command) {
    qkt::json cfg;
    if (!args.config_path.empty()) {
        cfg = qkt::json::parse(qkt::read_text_file(args.config_path));
    } else {
        cfg = qkt::json{{"version", 1}};
    }
    if (!args.preset.empty() && !cfg.contains("device"))
        cfg["device"] = qkt::json{{"preset", args.preset}};
    if (!cfg.is_object()) throw qkt::ConfigError(command + ": config must be a JSON object");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qutritkerr: simulation, calibration and benchmarking of two-qutrit cross-Kerr gates"};
    app.require_subcommand(1);

    struct SubSpec {
        const char* name;
        const char* desc;
        int (*fn)(const qkt::json&, const qkt::cli::RunContext&);
        CommonArgs args;
    };
    std::vector<SubSpec> subs = {
        {"sweep-alpha", "cross-Kerr rate sweeps over phase/amplitude/frequency",
         &qkt::cli::cmd_sweep_alpha, {}},
        {"calibrate", "search a pulse schedule realizing CZ or CZdag", &qkt::cli::cmd_calibrate, {}},
        {"cb", "cycle benchmarking on a synthetic noisy backend", &qkt::cli::cmd_cb, {}},
        {"xeb", "cross-entropy benchmarking on a synthetic noisy backend", &qkt::cli::cmd_xeb, {}},
        {"tomography", "state/process tomography with MLE reconstruction",
         &qkt::cli::cmd_tomography, {}},
        {"synthesize", "gate-expressibility coverage study", &qkt::cli::cmd_synthesize, {}},
        {"verify", "propagate a saved schedule and check repetitions", &qkt::cli::cmd_verify, {}},
    };
    for (auto& s : subs) add_common(app.add_subcommand(s.name, s.desc), s.args, false);

    CLI11_PARSE(app, argc, argv);

    for (auto& s : subs) {
        auto* sub = app.get_subcommand(s.name);
        if (!sub->parsed()) continue;
        qkt::cli::RunContext ctx;
        ctx.seed = s.args.seed;
        ctx.out_dir = s.args.out_dir;
        ctx.threads = s.args.threads > 0 ? s.args.threads
                                         : static_cast<int>(std::thread::hardware_concurrency());
        ctx.command = s.name;
        qkt::set_default_threads(ctx.threads);
        try {
            const auto cfg = load_config(s.args, s.name);
            return s.fn(cfg, ctx);
        } catch (const qkt::ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        } catch (const qkt::json::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 3;
        }
    }
    return 2;
}
