#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace arisim {

// splitmix64 finalizer, used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

// Deterministic seed for a named substream of a master seed. The extra
// indices distinguish per-episode / per-slot / per-link streams so that
// consuming one stream never perturbs another.
std::uint64_t substream_seed(std::uint64_t master, std::string_view tag,
                             std::uint64_t a = 0, std::uint64_t b = 0,
                             std::uint64_t c = 0);

// Seeded generator wrapper. All randomness in the library flows through
// this class so a run is reproducible from the single master seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform in {0, ..., n-1}, n > 0
    int uniform_int(int n);

    // standard normal via Box-Muller (pair cached)
    double normal();

    // exact engine + cache state, for bit-exact checkpoints
    std::string save_state() const;
    void load_state(const std::string& text);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace arisim
