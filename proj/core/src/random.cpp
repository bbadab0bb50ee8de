#include "pdqrng/random.hpp"

namespace pdqrng {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    auto z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t run_seed, Stage stage, std::uint64_t index) noexcept {
    std::uint64_t state = run_seed;
    std::uint64_t h = splitmix64(state);
    state = h ^ static_cast<std::uint64_t>(stage);
    h = splitmix64(state);
    state = h ^ index;
    return splitmix64(state);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) noexcept {
    auto x = seed;
    for (auto& v : s_) {
        v = splitmix64(x);
    }
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
} // namespace

Xoshiro256pp::result_type Xoshiro256pp::operator()() noexcept {
    const auto result = rotl(s_[0] + s_[3], 23) + s_[0];
    const auto t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

} // namespace pdqrng
