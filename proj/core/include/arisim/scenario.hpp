#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arisim/agent.hpp"
#include "arisim/channel.hpp"
#include "arisim/geometry.hpp"
#include "arisim/noma.hpp"
#include "arisim/optimize.hpp"
#include "arisim/rewards.hpp"

namespace arisim {

enum class GuLayout { Uniform, Clustered };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::string parameter;       // channel.elements | radio.p_g_dbm | gu_density | uav_spacing
    std::vector<double> values;
};

// Full experiment description. Everything is defaulted except the problem
// size; the JSON schema mirrors the nested structure below.
struct Scenario {
    int schema_version = 1;
    SchemeKind scheme = SchemeKind::FixedAris;
    AccessKind access = AccessKind::Noma;
    std::uint64_t master_seed = 1;
    int episodes = 2000;
    int eval_episodes = 10;

    double area_side = 1000.0;
    double altitude = 30.0;
    int num_uavs = 3;
    int num_gus = 9;
    int slots = 50;
    GuLayout layout = GuLayout::Uniform;
    std::vector<std::array<double, 2>> pois;
    double poi_stddev = 100.0;
    std::vector<std::array<double, 2>> uav_starts;          // empty -> spread on a line
    std::optional<std::array<double, 2>> reflector_start;   // fixed-reflector layout
    std::optional<std::array<double, 2>> shared_start;      // all platforms start here
    bool stationary = false;       // ignore movement actions (diagnostic runs)
    std::vector<int> mode_pin;     // pin dual-mode operating modes when non-empty
    bool regenerate_gus = false;   // fresh GU layout every episode

    MobilityLimits mobility;
    ChannelConstants channel;
    RadioParams radio;
    double queue_capacity = 50.0;
    double arrival_max = 10.0;

    OptimizeConfig optimizer;
    bool train_two_step = true;  // computation-efficient inner solver while training
    bool eval_full_ao = true;    // alternating optimization during evaluation

    HyperParams learner;
    RewardWeights reward_weights;

    std::string checkpoint_in;
    std::string checkpoint_out;
    bool record_timing = false;  // off keeps metrics files reproducible byte for byte
    std::optional<SweepSpec> sweep;

    void validate() const;  // throws ConfigError naming the offending field
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);
// resolved configuration as canonical JSON (recorded in the run manifest)
std::string scenario_to_text(const Scenario& sc);

// Command-line / environment overrides; they beat file values which beat
// built-in defaults.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    std::optional<SchemeKind> scheme;
    std::optional<AccessKind> access;
};

Scenario apply_overrides(Scenario sc, const Overrides& o);

std::string to_string(SchemeKind s);
std::string to_string(AccessKind a);
SchemeKind scheme_from_string(const std::string& s);
AccessKind access_from_string(const std::string& s);

// Apply one sweep parameter value; throws ConfigError on unknown parameters.
Scenario apply_sweep_value(Scenario sc, const std::string& parameter, double value);

} // namespace arisim
