#include "arisim/agent.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace arisim {

namespace {

constexpr char kMagic[] = "ARISIM-CKPT";
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_vec(std::ostream& os, const Eigen::VectorXd& v) {
    write_u64(os, static_cast<std::uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}
void write_str(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
Eigen::VectorXd read_vec(std::istream& is) {
    const auto n = read_u64(is);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return v;
}
std::string read_str(std::istream& is) {
    const auto n = read_u64(is);
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

void write_adam(std::ostream& os, const Adam& a) {
    write_f64(os, a.lr);
    write_u64(os, static_cast<std::uint64_t>(a.t));
    write_vec(os, a.m);
    write_vec(os, a.v);
}
void read_adam(std::istream& is, Adam& a) {
    a.lr = read_f64(is);
    a.t = static_cast<long long>(read_u64(is));
    a.m = read_vec(is);
    a.v = read_vec(is);
}

} // namespace

AgentEnsemble::AgentEnsemble(const std::vector<int>& state_dims,
                             const std::vector<int>& action_dims, int optimized_dim,
                             const HyperParams& hp, std::uint64_t seed)
    : hp_(hp),
      state_dims_(state_dims),
      action_dims_(action_dims),
      optimized_dim_(optimized_dim),
      buffer_(hp.buffer_capacity, substream_seed(seed, "replay")) {
    if (state_dims.size() != action_dims.size() || state_dims.empty()) {
        throw std::invalid_argument("AgentEnsemble: one state and action size per agent");
    }
    const int n = static_cast<int>(state_dims.size());
    const int joint = std::accumulate(state_dims.begin(), state_dims.end(), 0) +
                      std::accumulate(action_dims.begin(), action_dims.end(), 0) +
                      optimized_dim;
    for (int i = 0; i < n; ++i) {
        Rng init(substream_seed(seed, "init", static_cast<std::uint64_t>(i)));
        std::vector<int> actor_sizes{state_dims[i]};
        std::vector<int> critic_sizes{joint};
        for (int hsize : hp.hidden) {
            actor_sizes.push_back(hsize);
            critic_sizes.push_back(hsize);
        }
        actor_sizes.push_back(action_dims[i]);
        critic_sizes.push_back(1);
        actors_.emplace_back(actor_sizes, Activation::Tanh, init);
        critics_.emplace_back(critic_sizes, Activation::Linear, init);
        target_actors_.push_back(actors_.back());
        target_critics_.push_back(critics_.back());
        actor_opts_.push_back(Adam{.lr = hp.actor_lr});
        critic_opts_.push_back(Adam{.lr = hp.critic_lr});
        explore_rngs_.emplace_back(substream_seed(seed, "explore", static_cast<std::uint64_t>(i)));
    }
}

Eigen::VectorXd AgentEnsemble::act(int i, const Eigen::VectorXd& state, bool explore) {
    Eigen::VectorXd a = actors_[i].forward(state);
    if (!explore) return a;
    Rng& rng = explore_rngs_[i];
    if (rng.uniform() < hp_.epsilon) {
        for (Eigen::Index d = 0; d < a.size(); ++d) a[d] = rng.uniform(-1.0, 1.0);
        return a;
    }
    for (Eigen::Index d = 0; d < a.size(); ++d) {
        a[d] = std::clamp(a[d] + hp_.noise_scale * rng.normal(), -1.0, 1.0);
    }
    return a;
}

bool AgentEnsemble::warm() const {
    const std::size_t need = hp_.warmup > 0 ? static_cast<std::size_t>(hp_.warmup)
                                            : static_cast<std::size_t>(hp_.batch_size);
    return buffer_.size() >= std::max<std::size_t>(need, hp_.batch_size);
}

TrainDiagnostics AgentEnsemble::train_step() {
    TrainDiagnostics diag;
    if (!warm()) return diag;

    const int n = num_agents();
    const int batch = hp_.batch_size;
    const auto picks = buffer_.sample(batch);

    // batch matrices per agent plus the shared optimized features
    std::vector<Eigen::MatrixXd> states(n), actions(n), next_states(n);
    Eigen::MatrixXd optimized(batch, optimized_dim_);
    Eigen::VectorXd terminal(batch);
    for (int i = 0; i < n; ++i) {
        states[i].resize(batch, state_dims_[i]);
        actions[i].resize(batch, action_dims_[i]);
        next_states[i].resize(batch, state_dims_[i]);
    }
    for (int b = 0; b < batch; ++b) {
        const Transition& t = *picks[b];
        for (int i = 0; i < n; ++i) {
            states[i].row(b) = t.states[i];
            actions[i].row(b) = t.learned_actions[i];
            next_states[i].row(b) = t.next_states[i];
        }
        if (optimized_dim_ > 0) optimized.row(b) = t.optimized_action;
        terminal[b] = t.terminal ? 1.0 : 0.0;
    }

    const int joint = critics_[0].input_dim();
    auto join = [&](const std::vector<Eigen::MatrixXd>& s,
                    const std::vector<Eigen::MatrixXd>& a) {
        Eigen::MatrixXd x(batch, joint);
        int at = 0;
        for (int i = 0; i < n; ++i) {
            x.middleCols(at, state_dims_[i]) = s[i];
            at += state_dims_[i];
        }
        for (int i = 0; i < n; ++i) {
            x.middleCols(at, action_dims_[i]) = a[i];
            at += action_dims_[i];
        }
        if (optimized_dim_ > 0) x.middleCols(at, optimized_dim_) = optimized;
        return x;
    };

    // target policies at the next state; optimized features are carried over
    std::vector<Eigen::MatrixXd> next_actions(n);
    for (int i = 0; i < n; ++i) next_actions[i] = target_actors_[i].forward(next_states[i]);
    const Eigen::MatrixXd x_next = join(next_states, next_actions);
    const Eigen::MatrixXd x_now = join(states, actions);

    for (int i = 0; i < n; ++i) {
        // critic: mean squared TD error against the bootstrapped target
        const Eigen::VectorXd q_next = target_critics_[i].forward(x_next).col(0);
        Eigen::VectorXd y(batch);
        for (int b = 0; b < batch; ++b) {
            y[b] = picks[b]->rewards[i] + hp_.gamma_d * (1.0 - terminal[b]) * q_next[b];
        }
        Mlp::Cache cache;
        const Eigen::VectorXd q = critics_[i].forward(x_now, &cache).col(0);
        const Eigen::VectorXd err = q - y;
        diag.critic_loss += err.squaredNorm() / batch;
        Mlp::Gradients grads;
        const Eigen::MatrixXd cotangent = (2.0 / batch) * err;
        critics_[i].backward(cache, cotangent, &grads);
        Eigen::VectorXd params = critics_[i].parameters();
        critic_opts_[i].step(params, grads.flatten());
        critics_[i].set_parameters(params);

        // actor: ascend the critic along its own action block
        Mlp::Cache actor_cache;
        const Eigen::MatrixXd a_pi = actors_[i].forward(states[i], &actor_cache);
        std::vector<Eigen::MatrixXd> mixed = actions;
        mixed[i] = a_pi;
        Mlp::Cache critic_cache;
        const Eigen::MatrixXd x_pi = join(states, mixed);
        const Eigen::VectorXd value = critics_[i].forward(x_pi, &critic_cache).col(0);
        diag.policy_value += value.mean();
        const Eigen::MatrixXd dvalue = Eigen::MatrixXd::Constant(batch, 1, -1.0 / batch);
        const Eigen::MatrixXd dx = critics_[i].backward(critic_cache, dvalue, nullptr);
        int offset = std::accumulate(state_dims_.begin(), state_dims_.end(), 0);
        for (int j = 0; j < i; ++j) offset += action_dims_[j];
        const Eigen::MatrixXd da = dx.middleCols(offset, action_dims_[i]);
        Mlp::Gradients actor_grads;
        actors_[i].backward(actor_cache, da, &actor_grads);
        Eigen::VectorXd actor_params = actors_[i].parameters();
        actor_opts_[i].step(actor_params, actor_grads.flatten());
        actors_[i].set_parameters(actor_params);
    }
    soft_update(hp_.tau_soft);

    diag.trained = true;
    diag.critic_loss /= n;
    diag.policy_value /= n;
    return diag;
}

void AgentEnsemble::soft_update(double tau) {
    for (int i = 0; i < num_agents(); ++i) {
        target_actors_[i].set_parameters((1.0 - tau) * target_actors_[i].parameters() +
                                         tau * actors_[i].parameters());
        target_critics_[i].set_parameters((1.0 - tau) * target_critics_[i].parameters() +
                                          tau * critics_[i].parameters());
    }
}

void AgentEnsemble::save_checkpoint(std::ostream& os) const {
    os.write(kMagic, sizeof kMagic - 1);
    write_u32(os, kVersion);
    write_f64(os, hp_.actor_lr);
    write_f64(os, hp_.critic_lr);
    write_f64(os, hp_.gamma_d);
    write_f64(os, hp_.tau_soft);
    write_u32(os, static_cast<std::uint32_t>(hp_.batch_size));
    write_f64(os, hp_.epsilon);
    write_f64(os, hp_.noise_scale);
    write_u64(os, hp_.buffer_capacity);
    write_u32(os, static_cast<std::uint32_t>(hp_.warmup));
    write_u32(os, static_cast<std::uint32_t>(hp_.train_every));
    write_u32(os, static_cast<std::uint32_t>(hp_.hidden.size()));
    for (int h : hp_.hidden) write_u32(os, static_cast<std::uint32_t>(h));

    write_u32(os, static_cast<std::uint32_t>(num_agents()));
    write_u32(os, static_cast<std::uint32_t>(optimized_dim_));
    for (int i = 0; i < num_agents(); ++i) {
        write_u32(os, static_cast<std::uint32_t>(state_dims_[i]));
        write_u32(os, static_cast<std::uint32_t>(action_dims_[i]));
        write_vec(os, actors_[i].parameters());
        write_vec(os, critics_[i].parameters());
        write_vec(os, target_actors_[i].parameters());
        write_vec(os, target_critics_[i].parameters());
        write_adam(os, actor_opts_[i]);
        write_adam(os, critic_opts_[i]);
        write_str(os, explore_rngs_[i].save_state());
    }
    write_str(os, buffer_.sampler_state());
    if (!os) throw std::runtime_error("checkpoint: write failed");
}

void AgentEnsemble::load_checkpoint(std::istream& is) {
    char magic[sizeof kMagic - 1];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw std::runtime_error("checkpoint: bad magic");
    }
    const auto version = read_u32(is);
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    hp_.actor_lr = read_f64(is);
    hp_.critic_lr = read_f64(is);
    hp_.gamma_d = read_f64(is);
    hp_.tau_soft = read_f64(is);
    hp_.batch_size = static_cast<int>(read_u32(is));
    hp_.epsilon = read_f64(is);
    hp_.noise_scale = read_f64(is);
    hp_.buffer_capacity = read_u64(is);
    hp_.warmup = static_cast<int>(read_u32(is));
    hp_.train_every = static_cast<int>(read_u32(is));
    hp_.hidden.resize(read_u32(is));
    for (auto& h : hp_.hidden) h = static_cast<int>(read_u32(is));

    const int n = static_cast<int>(read_u32(is));
    if (n != num_agents()) throw std::runtime_error("checkpoint: agent count mismatch");
    const int ao = static_cast<int>(read_u32(is));
    if (ao != optimized_dim_) throw std::runtime_error("checkpoint: optimized size mismatch");
    for (int i = 0; i < n; ++i) {
        const int sd = static_cast<int>(read_u32(is));
        const int ad = static_cast<int>(read_u32(is));
        if (sd != state_dims_[i] || ad != action_dims_[i]) {
            throw std::runtime_error("checkpoint: agent dimensions mismatch");
        }
        actors_[i].set_parameters(read_vec(is));
        critics_[i].set_parameters(read_vec(is));
        target_actors_[i].set_parameters(read_vec(is));
        target_critics_[i].set_parameters(read_vec(is));
        read_adam(is, actor_opts_[i]);
        read_adam(is, critic_opts_[i]);
        explore_rngs_[i].load_state(read_str(is));
    }
    buffer_.set_sampler_state(read_str(is));
    if (!is) throw std::runtime_error("checkpoint: truncated stream");
}

void AgentEnsemble::save_checkpoint_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
    save_checkpoint(os);
}

void AgentEnsemble::load_checkpoint_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    load_checkpoint(is);
}

} // namespace arisim
