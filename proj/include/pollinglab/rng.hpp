#pragma once

#include <array>
#include <cstdint>

namespace pollinglab {

// xoshiro256++ (Blackman & Vigna, 2019). The four state words are derived
// from (seed, stream) with splitmix64, giving independent, platform-stable
// replication streams: stream r of seed s always produces the same draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    // uniform on the open interval (0,1); never 0 or 1
    double next_unit();

    // inverse-CDF exponential draw; rate > 0
    double exponential(double rate);

private:
    std::array<std::uint64_t, 4> state_{};
};

} // namespace pollinglab
