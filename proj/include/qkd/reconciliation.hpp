#pragma once

#include <cstddef>
#include <vector>

#include "qkd/bits.hpp"
#include "qkd/channel.hpp"
#include "qkd/rng.hpp"

namespace qkd {

inline constexpr std::size_t kAutoBlockSize = 0;

struct ReconParams {
    std::size_t initial_block_size = kAutoBlockSize; // 0 = derive from qber_est
    std::size_t agree_rounds_needed = 3;
    std::size_t max_rounds = 32;
};

struct ReconOutcome {
    BitVec corrected_alice;
    BitVec corrected_bob;
    std::size_t parity_comparisons = 0;
    std::size_t rounds_run = 0;
    bool converged = false;
    // Omniscient diagnostic: Hamming distance between the working keys before
    // round 1 and after each round.
    std::vector<std::size_t> hamming_by_round;
};

Bit block_parity(const BitVec& key, std::size_t lo, std::size_t hi);

// ceil(0.73 / max(qber_est, 1/len)) clamped to [2, len/2].
std::size_t auto_block_size(double qber_est, std::size_t key_len);

// Bisects a block whose parities differ, exchanging one parity per halving
// step over the channel, until the single mismatched position is found; Bob
// flips that bit. Returns the corrected position. Throws PARITY_AGREES when
// the block parities already match (an even error count masks itself).
std::size_t bisect_fix(const BitVec& alice_key, BitVec& bob_key, std::size_t lo, std::size_t hi,
                       PublicChannel& channel);

// Same, over a permuted view: slot s of the round maps to original index
// slot_to_index[s]. Adds each halving comparison to `comparisons`.
std::size_t bisect_fix(const BitVec& alice_key, BitVec& bob_key,
                       const std::vector<std::size_t>& slot_to_index, std::size_t lo,
                       std::size_t hi, PublicChannel& channel, std::size_t& comparisons);

// Rounds of permute -> block -> compare parities -> bisect until
// agree_rounds_needed consecutive clean rounds. Alice's key is the reference
// and is never modified. Throws NOT_CONVERGED when max_rounds is exhausted.
ReconOutcome reconcile(const BitVec& alice_key, const BitVec& bob_key, double qber_est,
                       const ReconParams& params, PublicChannel& channel, RandomStream& rng);

} // namespace qkd
