#pragma once

#include <cstdint>
#include <vector>

#include "qkd/bits.hpp"

namespace qkd {

// Deterministic xoshiro256** stream. Every stochastic choice in the simulator
// draws from an explicitly passed stream; there is no global randomness, so a
// session is fully reproducible from its 64-bit seed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next_u64();
    double next_unit(); // uniform in [0, 1)
    bool bernoulli(double p);
    std::uint64_t next_below(std::uint64_t bound); // uniform in [0, bound), bound >= 1
    Bit next_bit();
    BitVec next_bits(std::size_t count);

    // Seed for an independent child stream; advancing the child never
    // disturbs the parent.
    std::uint64_t fork_seed();

private:
    std::uint64_t state_[4];
};

// Fisher-Yates permutation of {0..n-1} derived from a disclosed seed; both
// parties reproduce it identically.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

} // namespace qkd
