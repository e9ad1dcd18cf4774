#include "arisim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace arisim {

using nlohmann::json;

namespace {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

[[noreturn]] void missing(const std::string& path) {
    throw ConfigError("missing required field " + path);
}

[[noreturn]] void bad_type(const std::string& path, const char* want) {
    throw ConfigError("field " + path + " must be " + want);
}

const json* find(const json& j, const std::string& key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_num(const json& j, const std::string& path, const std::string& key, double fallback) {
    const json* v = find(j, key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) bad_type(path + key, "a number");
    return v->get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key, int fallback) {
    const json* v = find(j, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) bad_type(path + key, "an integer");
    return v->get<int>();
}

int require_int(const json& j, const std::string& path, const std::string& key) {
    const json* v = find(j, key);
    if (v == nullptr) missing(path + key);
    if (!v->is_number_integer()) bad_type(path + key, "an integer");
    return v->get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool fallback) {
    const json* v = find(j, key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) bad_type(path + key, "a boolean");
    return v->get<bool>();
}

std::string get_str(const json& j, const std::string& path, const std::string& key,
                    const std::string& fallback) {
    const json* v = find(j, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) bad_type(path + key, "a string");
    return v->get<std::string>();
}

std::vector<std::array<double, 2>> get_points(const json& j, const std::string& path,
                                              const std::string& key) {
    std::vector<std::array<double, 2>> out;
    const json* v = find(j, key);
    if (v == nullptr) return out;
    if (!v->is_array()) bad_type(path + key, "an array of [x, y] pairs");
    for (const auto& p : *v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            bad_type(path + key, "an array of [x, y] pairs");
        }
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

PhaseStrategy phase_strategy_from_string(const std::string& s) {
    if (s == "heuristic") return PhaseStrategy::Heuristic;
    if (s == "coord_descent") return PhaseStrategy::CoordDescent;
    if (s == "oracle") return PhaseStrategy::Oracle;
    throw ConfigError("field optimizer.phase_strategy has unknown value '" + s + "'");
}

AssocStrategy assoc_strategy_from_string(const std::string& s) {
    if (s == "sca") return AssocStrategy::Sca;
    if (s == "oracle") return AssocStrategy::Oracle;
    throw ConfigError("field optimizer.assoc_strategy has unknown value '" + s + "'");
}

std::string to_string(PhaseStrategy s) {
    switch (s) {
        case PhaseStrategy::Heuristic: return "heuristic";
        case PhaseStrategy::CoordDescent: return "coord_descent";
        case PhaseStrategy::Oracle: return "oracle";
    }
    return "coord_descent";
}

std::string to_string(AssocStrategy s) {
    return s == AssocStrategy::Sca ? "sca" : "oracle";
}

std::string to_string(GuLayout l) { return l == GuLayout::Uniform ? "uniform" : "clustered"; }

} // namespace

std::string to_string(SchemeKind s) {
    switch (s) {
        case SchemeKind::FixedAris: return "fixed-aris";
        case SchemeKind::DmSwitching: return "dm-switching";
        case SchemeKind::AllActive: return "all-active";
    }
    return "fixed-aris";
}

std::string to_string(AccessKind a) {
    switch (a) {
        case AccessKind::Noma: return "noma";
        case AccessKind::Tdma: return "tdma";
        case AccessKind::Fdma: return "fdma";
    }
    return "noma";
}

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "fixed-aris") return SchemeKind::FixedAris;
    if (s == "dm-switching") return SchemeKind::DmSwitching;
    if (s == "all-active") return SchemeKind::AllActive;
    throw ConfigError("unknown scheme '" + s + "' (fixed-aris | dm-switching | all-active)");
}

AccessKind access_from_string(const std::string& s) {
    if (s == "noma") return AccessKind::Noma;
    if (s == "tdma") return AccessKind::Tdma;
    if (s == "fdma") return AccessKind::Fdma;
    throw ConfigError("unknown access '" + s + "' (noma | tdma | fdma)");
}

void Scenario::validate() const {
    if (schema_version != 1) throw ConfigError("field schema_version must be 1");
    if (num_uavs < 1) throw ConfigError("field geometry.num_uavs must be >= 1");
    if (num_gus < 1) throw ConfigError("field geometry.num_gus must be >= 1");
    if (slots < 1) throw ConfigError("field geometry.slots must be >= 1");
    if (area_side <= 0) throw ConfigError("field geometry.area_side must be positive");
    if (altitude <= 0) throw ConfigError("field geometry.altitude must be positive");
    if (layout == GuLayout::Clustered && pois.empty()) {
        throw ConfigError("field geometry.pois: clustered layout needs at least one PoI");
    }
    if (mobility.v_max <= 0) throw ConfigError("field mobility.v_max must be positive");
    if (mobility.d_min < 0) throw ConfigError("field mobility.d_min must be nonnegative");
    if (mobility.tau <= 0) throw ConfigError("field mobility.tau must be positive");
    if (channel.beta <= 0) throw ConfigError("field channel.beta must be positive");
    if (channel.alpha0 < 2) throw ConfigError("field channel.alpha0 must be >= 2");
    if (channel.elements < 1) throw ConfigError("field channel.elements must be >= 1");
    if (radio.p_g <= 0 || radio.sigma2 <= 0 || radio.gamma <= 0) {
        throw ConfigError("field radio: powers and threshold must be positive");
    }
    if (queue_capacity <= 0) throw ConfigError("field queue.capacity must be positive");
    if (arrival_max < 0) throw ConfigError("field queue.arrival_max must be nonnegative");
    if (episodes < 0 || eval_episodes < 0) throw ConfigError("field episodes must be nonnegative");
    if (learner.gamma_d < 0 || learner.gamma_d >= 1) {
        throw ConfigError("field learner.discount must be in [0, 1)");
    }
    if (learner.actor_lr <= 0 || learner.critic_lr <= 0) {
        throw ConfigError("field learner: learning rates must be positive");
    }
    if (learner.batch_size < 1) throw ConfigError("field learner.batch_size must be >= 1");
    if (!mode_pin.empty() && static_cast<int>(mode_pin.size()) != num_uavs) {
        throw ConfigError("field geometry.mode_pin must list one mode per UAV");
    }
    if (sweep && sweep->values.empty()) {
        throw ConfigError("field sweep.values must be non-empty");
    }
}

Scenario parse_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    Scenario sc;
    const json* v = find(j, "schema_version");
    if (v == nullptr) missing("schema_version");
    if (!v->is_number_integer()) bad_type("schema_version", "an integer");
    sc.schema_version = v->get<int>();

    sc.scheme = scheme_from_string(get_str(j, "", "scheme", to_string(sc.scheme)));
    sc.access = access_from_string(get_str(j, "", "access", to_string(sc.access)));
    const json* seed = find(j, "master_seed");
    if (seed != nullptr) {
        if (!seed->is_number_unsigned() && !seed->is_number_integer()) {
            bad_type("master_seed", "an integer");
        }
        sc.master_seed = seed->get<std::uint64_t>();
    }
    sc.episodes = get_int(j, "", "episodes", sc.episodes);
    sc.eval_episodes = get_int(j, "", "eval_episodes", sc.eval_episodes);
    sc.checkpoint_in = get_str(j, "", "checkpoint_in", sc.checkpoint_in);
    sc.checkpoint_out = get_str(j, "", "checkpoint_out", sc.checkpoint_out);
    sc.record_timing = get_bool(j, "", "record_timing", sc.record_timing);

    const json* g = find(j, "geometry");
    if (g == nullptr) missing("geometry");
    if (!g->is_object()) bad_type("geometry", "an object");
    const std::string gp = "geometry.";
    sc.num_uavs = require_int(*g, gp, "num_uavs");
    sc.num_gus = require_int(*g, gp, "num_gus");
    sc.slots = get_int(*g, gp, "slots", sc.slots);
    sc.area_side = get_num(*g, gp, "area_side", sc.area_side);
    sc.altitude = get_num(*g, gp, "altitude", sc.altitude);
    const std::string layout = get_str(*g, gp, "gu_layout", "uniform");
    if (layout == "uniform") sc.layout = GuLayout::Uniform;
    else if (layout == "clustered") sc.layout = GuLayout::Clustered;
    else throw ConfigError("field geometry.gu_layout has unknown value '" + layout + "'");
    sc.pois = get_points(*g, gp, "pois");
    sc.poi_stddev = get_num(*g, gp, "poi_stddev", sc.poi_stddev);
    sc.uav_starts = get_points(*g, gp, "uav_starts");
    auto reflector = get_points(*g, gp, "reflector_start");
    if (!reflector.empty()) sc.reflector_start = reflector.front();
    auto shared = get_points(*g, gp, "shared_start");
    if (!shared.empty()) sc.shared_start = shared.front();
    sc.stationary = get_bool(*g, gp, "stationary", sc.stationary);
    sc.regenerate_gus = get_bool(*g, gp, "regenerate_gus", sc.regenerate_gus);
    if (const json* pin = find(*g, "mode_pin"); pin != nullptr) {
        if (!pin->is_array()) bad_type("geometry.mode_pin", "an array of 0/1");
        for (const auto& p : *pin) {
            if (!p.is_number_integer()) bad_type("geometry.mode_pin", "an array of 0/1");
            sc.mode_pin.push_back(p.get<int>() != 0 ? 1 : 0);
        }
    }

    if (const json* mb = find(j, "mobility"); mb != nullptr) {
        const std::string p = "mobility.";
        sc.mobility.v_max = get_num(*mb, p, "v_max", sc.mobility.v_max);
        sc.mobility.d_min = get_num(*mb, p, "d_min", sc.mobility.d_min);
        sc.mobility.tau = get_num(*mb, p, "tau", sc.mobility.tau);
    }
    sc.mobility.area_side = sc.area_side;

    if (const json* ch = find(j, "channel"); ch != nullptr) {
        const std::string p = "channel.";
        sc.channel.beta = get_num(*ch, p, "beta", sc.channel.beta);
        sc.channel.alpha0 = get_num(*ch, p, "alpha0", sc.channel.alpha0);
        sc.channel.elements = get_int(*ch, p, "elements", sc.channel.elements);
        sc.channel.spacing_ratio = get_num(*ch, p, "spacing_ratio", sc.channel.spacing_ratio);
        sc.channel.rician_fading = get_bool(*ch, p, "rician_fading", sc.channel.rician_fading);
        sc.channel.rician_k = get_num(*ch, p, "rician_k", sc.channel.rician_k);
        sc.channel.min_distance = get_num(*ch, p, "min_distance", sc.channel.min_distance);
    }

    if (const json* r = find(j, "radio"); r != nullptr) {
        const std::string p = "radio.";
        sc.radio.p_g = dbm_to_watts(get_num(*r, p, "p_g_dbm", watts_to_dbm(sc.radio.p_g)));
        sc.radio.sigma2 = dbm_to_watts(get_num(*r, p, "noise_dbm", watts_to_dbm(sc.radio.sigma2)));
        sc.radio.gamma = get_num(*r, p, "gamma", sc.radio.gamma);
    }

    if (const json* q = find(j, "queue"); q != nullptr) {
        const std::string p = "queue.";
        sc.queue_capacity = get_num(*q, p, "capacity", sc.queue_capacity);
        sc.arrival_max = get_num(*q, p, "arrival_max", sc.arrival_max);
    }

    if (const json* o = find(j, "optimizer"); o != nullptr) {
        const std::string p = "optimizer.";
        sc.optimizer.phase_strategy = phase_strategy_from_string(
            get_str(*o, p, "phase_strategy", to_string(sc.optimizer.phase_strategy)));
        sc.optimizer.assoc_strategy = assoc_strategy_from_string(
            get_str(*o, p, "assoc_strategy", to_string(sc.optimizer.assoc_strategy)));
        sc.optimizer.ao_tol = get_num(*o, p, "ao_tol", sc.optimizer.ao_tol);
        sc.optimizer.ao_max_iters = get_int(*o, p, "ao_max_iters", sc.optimizer.ao_max_iters);
        sc.optimizer.phase_sweep_tol = get_num(*o, p, "phase_sweep_tol", sc.optimizer.phase_sweep_tol);
        sc.optimizer.phase_max_sweeps = get_int(*o, p, "phase_max_sweeps", sc.optimizer.phase_max_sweeps);
        sc.optimizer.penalty_tol = get_num(*o, p, "penalty_tol", sc.optimizer.penalty_tol);
        sc.optimizer.kappa_init = get_num(*o, p, "kappa_init", sc.optimizer.kappa_init);
        sc.optimizer.kappa_growth = get_num(*o, p, "kappa_growth", sc.optimizer.kappa_growth);
        sc.optimizer.kappa_max = get_num(*o, p, "kappa_max", sc.optimizer.kappa_max);
        sc.optimizer.fw_max_iters = get_int(*o, p, "fw_max_iters", sc.optimizer.fw_max_iters);
        sc.train_two_step = get_bool(*o, p, "train_two_step", sc.train_two_step);
        sc.eval_full_ao = get_bool(*o, p, "eval_full_ao", sc.eval_full_ao);
    }

    if (const json* l = find(j, "learner"); l != nullptr) {
        const std::string p = "learner.";
        sc.learner.actor_lr = get_num(*l, p, "actor_lr", sc.learner.actor_lr);
        sc.learner.critic_lr = get_num(*l, p, "critic_lr", sc.learner.critic_lr);
        sc.learner.gamma_d = get_num(*l, p, "discount", sc.learner.gamma_d);
        sc.learner.tau_soft = get_num(*l, p, "soft_tau", sc.learner.tau_soft);
        sc.learner.batch_size = get_int(*l, p, "batch_size", sc.learner.batch_size);
        sc.learner.epsilon = get_num(*l, p, "epsilon", sc.learner.epsilon);
        sc.learner.noise_scale = get_num(*l, p, "noise_scale", sc.learner.noise_scale);
        sc.learner.buffer_capacity = static_cast<std::size_t>(
            get_num(*l, p, "buffer_capacity", static_cast<double>(sc.learner.buffer_capacity)));
        sc.learner.warmup = get_int(*l, p, "warmup", sc.learner.warmup);
        sc.learner.train_every = get_int(*l, p, "train_every", sc.learner.train_every);
        if (const json* h = find(*l, "hidden"); h != nullptr) {
            if (!h->is_array()) bad_type("learner.hidden", "an array of integers");
            sc.learner.hidden.clear();
            for (const auto& e : *h) {
                if (!e.is_number_integer()) bad_type("learner.hidden", "an array of integers");
                sc.learner.hidden.push_back(e.get<int>());
            }
        }
    }

    if (const json* r = find(j, "rewards"); r != nullptr) {
        const std::string p = "rewards.";
        sc.reward_weights.l_u = get_num(*r, p, "l_u", sc.reward_weights.l_u);
        sc.reward_weights.l_r = get_num(*r, p, "l_r", sc.reward_weights.l_r);
        sc.reward_weights.j_u = get_num(*r, p, "j_u", sc.reward_weights.j_u);
        sc.reward_weights.j_r = get_num(*r, p, "j_r", sc.reward_weights.j_r);
    }

    if (const json* s = find(j, "sweep"); s != nullptr) {
        if (!s->is_object()) bad_type("sweep", "an object");
        SweepSpec spec;
        spec.parameter = get_str(*s, "sweep.", "parameter", "");
        if (spec.parameter.empty()) missing("sweep.parameter");
        const json* vals = find(*s, "values");
        if (vals == nullptr) missing("sweep.values");
        if (!vals->is_array()) bad_type("sweep.values", "an array of numbers");
        for (const auto& e : *vals) {
            if (!e.is_number()) bad_type("sweep.values", "an array of numbers");
            spec.values.push_back(e.get<double>());
        }
        sc.sweep = std::move(spec);
    }

    sc.validate();
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string scenario_to_text(const Scenario& sc) {
    json j;
    j["schema_version"] = sc.schema_version;
    j["scheme"] = to_string(sc.scheme);
    j["access"] = to_string(sc.access);
    j["master_seed"] = sc.master_seed;
    j["episodes"] = sc.episodes;
    j["eval_episodes"] = sc.eval_episodes;
    j["record_timing"] = sc.record_timing;
    if (!sc.checkpoint_in.empty()) j["checkpoint_in"] = sc.checkpoint_in;
    if (!sc.checkpoint_out.empty()) j["checkpoint_out"] = sc.checkpoint_out;

    json g;
    g["num_uavs"] = sc.num_uavs;
    g["num_gus"] = sc.num_gus;
    g["slots"] = sc.slots;
    g["area_side"] = sc.area_side;
    g["altitude"] = sc.altitude;
    g["gu_layout"] = to_string(sc.layout);
    if (!sc.pois.empty()) {
        g["pois"] = json::array();
        for (const auto& p : sc.pois) g["pois"].push_back({p[0], p[1]});
        g["poi_stddev"] = sc.poi_stddev;
    }
    if (!sc.uav_starts.empty()) {
        g["uav_starts"] = json::array();
        for (const auto& p : sc.uav_starts) g["uav_starts"].push_back({p[0], p[1]});
    }
    if (sc.reflector_start) g["reflector_start"] = {{(*sc.reflector_start)[0], (*sc.reflector_start)[1]}};
    if (sc.shared_start) g["shared_start"] = {{(*sc.shared_start)[0], (*sc.shared_start)[1]}};
    g["stationary"] = sc.stationary;
    g["regenerate_gus"] = sc.regenerate_gus;
    if (!sc.mode_pin.empty()) g["mode_pin"] = sc.mode_pin;
    j["geometry"] = g;

    j["mobility"] = {{"v_max", sc.mobility.v_max},
                     {"d_min", sc.mobility.d_min},
                     {"tau", sc.mobility.tau}};
    j["channel"] = {{"beta", sc.channel.beta},
                    {"alpha0", sc.channel.alpha0},
                    {"elements", sc.channel.elements},
                    {"spacing_ratio", sc.channel.spacing_ratio},
                    {"rician_fading", sc.channel.rician_fading},
                    {"rician_k", sc.channel.rician_k}};
    j["radio"] = {{"p_g_dbm", watts_to_dbm(sc.radio.p_g)},
                  {"noise_dbm", watts_to_dbm(sc.radio.sigma2)},
                  {"gamma", sc.radio.gamma}};
    j["queue"] = {{"capacity", sc.queue_capacity}, {"arrival_max", sc.arrival_max}};
    j["optimizer"] = {{"phase_strategy", to_string(sc.optimizer.phase_strategy)},
                      {"assoc_strategy", to_string(sc.optimizer.assoc_strategy)},
                      {"ao_tol", sc.optimizer.ao_tol},
                      {"ao_max_iters", sc.optimizer.ao_max_iters},
                      {"train_two_step", sc.train_two_step},
                      {"eval_full_ao", sc.eval_full_ao}};
    j["learner"] = {{"actor_lr", sc.learner.actor_lr},
                    {"critic_lr", sc.learner.critic_lr},
                    {"discount", sc.learner.gamma_d},
                    {"soft_tau", sc.learner.tau_soft},
                    {"batch_size", sc.learner.batch_size},
                    {"epsilon", sc.learner.epsilon},
                    {"noise_scale", sc.learner.noise_scale},
                    {"buffer_capacity", sc.learner.buffer_capacity},
                    {"warmup", sc.learner.warmup},
                    {"train_every", sc.learner.train_every},
                    {"hidden", sc.learner.hidden}};
    j["rewards"] = {{"l_u", sc.reward_weights.l_u},
                    {"l_r", sc.reward_weights.l_r},
                    {"j_u", sc.reward_weights.j_u},
                    {"j_r", sc.reward_weights.j_r}};
    if (sc.sweep) {
        j["sweep"] = {{"parameter", sc.sweep->parameter}, {"values", sc.sweep->values}};
    }
    return j.dump(2);
}

Scenario apply_overrides(Scenario sc, const Overrides& o) {
    if (o.seed) sc.master_seed = *o.seed;
    if (o.episodes) sc.episodes = *o.episodes;
    if (o.scheme) sc.scheme = *o.scheme;
    if (o.access) sc.access = *o.access;
    sc.validate();
    return sc;
}

Scenario apply_sweep_value(Scenario sc, const std::string& parameter, double value) {
    sc.sweep.reset();
    if (parameter == "channel.elements") {
        sc.channel.elements = static_cast<int>(value);
    } else if (parameter == "radio.p_g_dbm") {
        sc.radio.p_g = dbm_to_watts(value);
    } else if (parameter == "gu_density") {
        // density 1 keeps the configured GU count; higher packs more GUs
        sc.num_gus = std::max(1, static_cast<int>(std::lround(sc.num_gus * value)));
    } else if (parameter == "uav_spacing") {
        // symmetric pair around the area center, reflector at the center
        if (sc.num_uavs != 2) {
            throw ConfigError("sweep uav_spacing requires geometry.num_uavs = 2");
        }
        const double c = sc.area_side / 2.0;
        sc.uav_starts = {{c - value / 2.0, c}, {c + value / 2.0, c}};
        sc.reflector_start = {{c, c}};
    } else {
        throw ConfigError("unknown sweep parameter '" + parameter + "'");
    }
    sc.validate();
    return sc;
}

} // namespace arisim
