#pragma once

#include <cstdint>
#include <limits>

namespace mfl {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: the stream is a pure function of (seed, stream, step),
// so results do not depend on how particles are spread over threads.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step = 0)
        : key_(splitmix64(seed ^ splitmix64(stream ^ splitmix64(step + 0x632be59bd9b4e019ULL))))
    {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++ctr_); }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

} // namespace mfl
