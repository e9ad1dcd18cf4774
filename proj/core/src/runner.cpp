#include "arisim/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "arisim/env.hpp"
#include "arisim/rng.hpp"

namespace arisim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunSummary {
    int episodes = 0;
    double total_throughput_bits = 0.0;
    double eval_mean_bits = 0.0;
    double eval_mean_nats = 0.0;
    long long wall_ms_total = 0;
    std::vector<std::string> artifacts;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path);
}

json artifact_entry(const fs::path& dir, const std::string& name) {
    const std::string full = (dir / name).string();
    json e;
    e["path"] = name;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(full)));
    e["fnv1a64"] = buf;
    e["bytes"] = static_cast<std::uint64_t>(fs::file_size(full));
    return e;
}

// One full experiment: training episodes, then deterministic evaluation.
RunSummary run_single(Scenario sc, const RunConfig& rc, const fs::path& dir) {
    fs::create_directories(dir);

    std::ofstream solver_os;
    if (rc.verbosity > 0) {
        solver_os.open(dir / "solver.jsonl", std::ios::binary);
        if (!solver_os) throw std::runtime_error("cannot write solver log");
        sc.optimizer.trace = &solver_os;
    }

    Env env(sc);
    AgentEnsemble agents = make_ensemble(env, sc.learner, substream_seed(sc.master_seed, "agents"));
    if (!sc.checkpoint_in.empty()) agents.load_checkpoint_file(sc.checkpoint_in);

    std::ofstream trace_os;
    if (rc.trace) {
        trace_os.open(dir / "trace.jsonl", std::ios::binary);
        if (!trace_os) throw std::runtime_error("cannot write trace file");
    }

    auto emit_trace = [&](int episode, const std::vector<StepOutcome>& outcomes) {
        if (!trace_os) return;
        for (const auto& out : outcomes) {
            const int platforms = static_cast<int>(out.positions.size());
            for (int p = 0; p < platforms; ++p) {
                const int mode = p < static_cast<int>(out.modes.size()) ? out.modes[p] : 0;
                trace_os << "{\"episode\":" << episode << ",\"slot\":" << out.slot
                         << ",\"platform\":" << p << ",\"x\":" << format_double(out.positions[p].x)
                         << ",\"y\":" << format_double(out.positions[p].y) << ",\"mode\":" << mode
                         << ",\"reward\":" << format_double(out.rewards[p]) << "}\n";
            }
        }
    };

    std::vector<EpisodeRow> rows;
    RunSummary summary;
    const auto run_phase = [&](int count, int episode_base, bool train) {
        double phase_bits = 0.0, phase_nats = 0.0;
        for (int e = 0; e < count; ++e) {
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<StepOutcome> outcomes;
            const EpisodeMetrics m =
                run_episode(env, episode_base + e, agents, train, train,
                            rc.trace ? &outcomes : nullptr);
            const auto t1 = std::chrono::steady_clock::now();
            const long long ms =
                std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
            summary.wall_ms_total += ms;

            EpisodeRow row;
            row.episode = static_cast<int>(rows.size());
            row.scheme = to_string(sc.scheme);
            row.access = to_string(sc.access);
            row.seed = sc.master_seed;
            row.throughput_bits = m.throughput_bits;
            row.mean_reward = m.mean_reward;
            row.violations = m.violation_count;
            row.wall_ms = sc.record_timing ? ms : 0;  // zero keeps metrics reproducible
            rows.push_back(row);
            summary.total_throughput_bits += m.throughput_bits;
            phase_bits += m.throughput_bits;
            phase_nats += m.throughput;
            emit_trace(episode_base + e, outcomes);
        }
        return std::pair<double, double>(phase_bits, phase_nats);
    };

    if (!rc.eval_only) run_phase(sc.episodes, 0, true);
    const auto [eval_bits, eval_nats] = run_phase(sc.eval_episodes, sc.episodes, false);
    if (sc.eval_episodes > 0) {
        summary.eval_mean_bits = eval_bits / sc.eval_episodes;
        summary.eval_mean_nats = eval_nats / sc.eval_episodes;
    }
    summary.episodes = static_cast<int>(rows.size());

    if (!sc.checkpoint_out.empty()) {
        agents.save_checkpoint_file(sc.checkpoint_out);
    }

    emit_metrics(rows, (dir / "metrics.csv").string());
    summary.artifacts.push_back("metrics.csv");
    if (rc.trace) {
        trace_os.close();
        summary.artifacts.push_back("trace.jsonl");
    }
    if (rc.verbosity > 0) {
        solver_os.close();
        summary.artifacts.push_back("solver.jsonl");
    }

    // manifest: resolved config, seed, artifact checksums, totals
    json manifest;
    manifest["schema_version"] = 1;
    manifest["master_seed"] = sc.master_seed;
    manifest["config"] = json::parse(scenario_to_text(sc));
    manifest["artifacts"] = json::array();
    for (const auto& name : summary.artifacts) {
        manifest["artifacts"].push_back(artifact_entry(dir, name));
    }
    manifest["totals"] = {
        {"episodes", summary.episodes},
        {"throughput_bits", summary.total_throughput_bits},
        {"throughput_nats", summary.total_throughput_bits * std::numbers::ln2},
        {"eval_throughput_bits_mean", summary.eval_mean_bits},
    };
    manifest["timing"] = {{"wall_ms_total", summary.wall_ms_total}};
    write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return summary;
}

} // namespace

void emit_metrics(const std::vector<EpisodeRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write metrics file " + path);
    os << "episode,scheme,access,seed,throughput_bits,mean_reward,violations,wall_ms\n";
    for (const auto& r : rows) {
        os << r.episode << ',' << r.scheme << ',' << r.access << ',' << r.seed << ','
           << format_double(r.throughput_bits) << ',' << format_double(r.mean_reward) << ','
           << r.violations << ',' << r.wall_ms << '\n';
    }
    if (!os) throw std::runtime_error("write failed for metrics file " + path);
}

std::vector<EpisodeRow> parse_metrics(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read metrics file " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("metrics file is empty: " + path);
    std::vector<EpisodeRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        EpisodeRow r;
        std::getline(ls, field, ',');
        r.episode = std::stoi(field);
        std::getline(ls, r.scheme, ',');
        std::getline(ls, r.access, ',');
        std::getline(ls, field, ',');
        r.seed = std::stoull(field);
        std::getline(ls, field, ',');
        r.throughput_bits = std::stod(field);
        std::getline(ls, field, ',');
        r.mean_reward = std::stod(field);
        std::getline(ls, field, ',');
        r.violations = std::stoi(field);
        std::getline(ls, field, ',');
        r.wall_ms = std::stoll(field);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (is.read(buf, sizeof buf) || is.gcount() > 0) {
        const auto n = static_cast<std::size_t>(is.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

int run_experiment(const RunConfig& rc) {
    Scenario sc;
    try {
        sc = load_scenario_file(rc.config_path);
        sc = apply_overrides(sc, rc.overrides);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const fs::path out_dir(rc.out_dir);
        fs::create_directories(out_dir);

        if (sc.sweep) {
            const SweepSpec sweep = *sc.sweep;
            std::ostringstream csv;
            csv << "parameter,value,episodes,eval_throughput_bits_mean,"
                   "eval_throughput_nats_mean,seed\n";
            json manifest;
            manifest["schema_version"] = 1;
            manifest["sweep"] = {{"parameter", sweep.parameter}, {"values", sweep.values}};
            manifest["runs"] = json::array();
            for (double value : sweep.values) {
                const Scenario point = apply_sweep_value(sc, sweep.parameter, value);
                std::ostringstream sub;
                sub << "sweep_" << format_double(value);
                const fs::path sub_dir = out_dir / sub.str();
                const RunSummary s = run_single(point, rc, sub_dir);
                csv << sweep.parameter << ',' << format_double(value) << ',' << s.episodes << ','
                    << format_double(s.eval_mean_bits) << ',' << format_double(s.eval_mean_nats)
                    << ',' << point.master_seed << '\n';
                manifest["runs"].push_back({{"value", value}, {"dir", sub.str()}});
            }
            write_text((out_dir / "sweep.csv").string(), csv.str());
            manifest["artifacts"] = json::array();
            manifest["artifacts"].push_back(artifact_entry(out_dir, "sweep.csv"));
            write_text((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
        } else {
            run_single(sc, rc, out_dir);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

} // namespace arisim
