#include "arisim/replay.hpp"

#include <stdexcept>
#include <utility>

namespace arisim {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : cap_(capacity), rng_(seed) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (!full_ && next_ == cap_) full_ = true;
    if (full_) {
        storage_[next_ % cap_] = std::move(t);
        next_ = (next_ + 1) % cap_;
    } else {
        storage_.push_back(std::move(t));
        pool_.push_back(static_cast<int>(next_));
        ++next_;
        if (next_ == cap_) {
            full_ = true;
            next_ = 0;
        }
    }
}

std::vector<const Transition*> ReplayBuffer::sample(int batch) {
    const int n = static_cast<int>(size());
    if (batch <= 0 || batch > n) {
        throw std::invalid_argument("ReplayBuffer::sample: batch larger than stored data");
    }
    // partial Fisher-Yates over the persistent index pool
    std::vector<const Transition*> picks;
    picks.reserve(batch);
    for (int i = 0; i < batch; ++i) {
        const int j = i + rng_.uniform_int(n - i);
        std::swap(pool_[i], pool_[j]);
        picks.push_back(&storage_[pool_[i]]);
    }
    return picks;
}

} // namespace arisim
