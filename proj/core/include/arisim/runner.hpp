#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arisim/scenario.hpp"

namespace arisim {

struct RunConfig {
    std::string config_path;
    Overrides overrides;
    std::string out_dir = "out";
    bool eval_only = false;
    bool trace = false;
    int verbosity = 0;
};

struct EpisodeRow {
    int episode = 0;
    std::string scheme;
    std::string access;
    std::uint64_t seed = 0;
    double throughput_bits = 0.0;
    double mean_reward = 0.0;
    int violations = 0;
    long long wall_ms = 0;
};

// CSV with the fixed header
//   episode,scheme,access,seed,throughput_bits,mean_reward,violations,wall_ms
// written with 17 significant digits so a parse recovers the numbers exactly.
void emit_metrics(const std::vector<EpisodeRow>& rows, const std::string& path);
std::vector<EpisodeRow> parse_metrics(const std::string& path);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::string& path);

// Load config, apply overrides, run (or sweep), write metrics + manifest
// (+ trace with rc.trace). Exit codes: 0 ok, 2 config error, 3 runtime error.
int run_experiment(const RunConfig& rc);

} // namespace arisim
