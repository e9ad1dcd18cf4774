#include "arisim/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace arisim {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::string_view tag,
                             std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    // FNV-1a over the tag, then mix in the indices one at a time.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    h = mix64(h ^ master);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

int Rng::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    // rejection sampling to avoid modulo bias
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % span);
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

std::string Rng::save_state() const {
    std::ostringstream os;
    // spare is serialized as raw bits so the round trip is exact
    os << engine_ << ' ' << (have_spare_ ? 1 : 0) << ' '
       << std::bit_cast<std::uint64_t>(spare_);
    return os.str();
}

void Rng::load_state(const std::string& text) {
    std::istringstream is(text);
    int flag = 0;
    std::uint64_t bits = 0;
    is >> engine_ >> flag >> bits;
    if (!is) throw std::runtime_error("Rng::load_state: malformed state string");
    have_spare_ = flag != 0;
    spare_ = std::bit_cast<double>(bits);
}

} // namespace arisim
