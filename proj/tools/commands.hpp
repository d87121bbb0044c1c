#pragma once

#include <cstdint>
#include <filesystem>

#include "qkt/io.hpp"

namespace qkt {
namespace cli {

struct RunContext {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    int threads = 0;
    std::string command;
};

void write_manifest(const RunContext& ctx, const json& config_echo);

int cmd_sweep_alpha(const json& cfg, const RunContext& ctx);
int cmd_calibrate(const json& cfg, const RunContext& ctx);
int cmd_cb(const json& cfg, const RunContext& ctx);
int cmd_xeb(const json& cfg, const RunContext& ctx);
int cmd_tomography(const json& cfg, const RunContext& ctx);
int cmd_synthesize(const json& cfg, const RunContext& ctx);
int cmd_verify(const json& cfg, const RunContext& ctx);

}  // namespace cli
}  // namespace qkt
