#include "qkd/reconciliation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qkd/errors.hpp"

namespace qkd {

namespace {

Bit mapped_parity(const BitVec& key, const std::vector<std::size_t>& slot_to_index,
                  std::size_t lo, std::size_t hi) {
    Bit p = 0;
    for (std::size_t s = lo; s < hi; ++s) {
        p ^= key[slot_to_index[s]];
    }
    return p;
}

Bytes parity_payload(std::size_t lo, std::size_t hi, Bit parity) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(lo));
    put_u32(out, static_cast<std::uint32_t>(hi));
    out.push_back(parity);
    return out;
}

// Alice announces her parity for the slot range; Bob answers with his.
// One exchange = one compared check sum.
bool compare_parities(const BitVec& alice_key, const BitVec& bob_key,
                      const std::vector<std::size_t>& slot_to_index, std::size_t lo,
                      std::size_t hi, PublicChannel& channel, std::size_t& comparisons) {
    const Bit pa = mapped_parity(alice_key, slot_to_index, lo, hi);
    channel.send(Party::Alice, Party::Bob, MessageKind::Parity, parity_payload(lo, hi, pa));
    const Bit pb = mapped_parity(bob_key, slot_to_index, lo, hi);
    channel.send(Party::Bob, Party::Alice, MessageKind::ParityReply, Bytes{pb});
    ++comparisons;
    return pa == pb;
}

} // namespace

Bit block_parity(const BitVec& key, std::size_t lo, std::size_t hi) {
    return parity_of(key, lo, hi);
}

std::size_t auto_block_size(double qber_est, std::size_t key_len) {
    const double floor_rate = 1.0 / static_cast<double>(key_len);
    const double rate = std::max(qber_est, floor_rate);
    auto size = static_cast<std::size_t>(std::ceil(0.73 / rate));
    size = std::max<std::size_t>(size, 2);
    size = std::min(size, key_len / 2);
    return size;
}

std::size_t bisect_fix(const BitVec& alice_key, BitVec& bob_key,
                       const std::vector<std::size_t>& slot_to_index, std::size_t lo,
                       std::size_t hi, PublicChannel& channel, std::size_t& comparisons) {
    if (lo >= hi || hi > slot_to_index.size()) {
        raise(Errc::OutOfRange, "bisect block [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + ")");
    }
    if (mapped_parity(alice_key, slot_to_index, lo, hi) ==
        mapped_parity(bob_key, slot_to_index, lo, hi)) {
        raise(Errc::ParityAgrees, "bisect on a block whose parities match");
    }
    // Only the left half is compared at each level; the right half's parity
    // is implied by the parent mismatch.
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (compare_parities(alice_key, bob_key, slot_to_index, lo, mid, channel, comparisons)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const std::size_t position = slot_to_index[lo];
    bob_key[position] ^= 1u;
    return position;
}

std::size_t bisect_fix(const BitVec& alice_key, BitVec& bob_key, std::size_t lo, std::size_t hi,
                       PublicChannel& channel) {
    std::vector<std::size_t> identity(alice_key.size());
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    std::size_t comparisons = 0;
    return bisect_fix(alice_key, bob_key, identity, lo, hi, channel, comparisons);
}

ReconOutcome reconcile(const BitVec& alice_key, const BitVec& bob_key, double qber_est,
                       const ReconParams& params, PublicChannel& channel, RandomStream& rng) {
    const std::size_t n = alice_key.size();
    if (n != bob_key.size()) {
        raise(Errc::LengthMismatch, "reconcile over lengths " + std::to_string(n) + " and " +
                                        std::to_string(bob_key.size()));
    }
    if (n == 0) {
        raise(Errc::EmptyKey, "reconcile on empty keys");
    }
    const std::size_t block = params.initial_block_size == kAutoBlockSize
                                  ? auto_block_size(qber_est, n)
                                  : params.initial_block_size;
    if (block < 2 || 2 * block > n) {
        raise(Errc::KeyTooShort, "key length " + std::to_string(n) +
                                     " cannot host blocks of size " + std::to_string(block));
    }

    ReconOutcome out;
    out.corrected_alice = alice_key;
    out.corrected_bob = bob_key;
    out.hamming_by_round.push_back(hamming_distance(alice_key, out.corrected_bob));

    std::size_t clean_rounds = 0;
    while (out.rounds_run < params.max_rounds && clean_rounds < params.agree_rounds_needed) {
        ++out.rounds_run;

        const std::uint64_t perm_seed = rng.next_u64();
        Bytes seed_payload;
        put_u64(seed_payload, perm_seed);
        channel.send(Party::Alice, Party::Bob, MessageKind::PermutationSeed,
                     std::move(seed_payload));
        const auto perm = seeded_permutation(n, perm_seed);

        std::size_t mismatched_blocks = 0;
        for (std::size_t lo = 0; lo < n; lo += block) {
            const std::size_t hi = std::min(lo + block, n);
            if (!compare_parities(alice_key, out.corrected_bob, perm, lo, hi, channel,
                                  out.parity_comparisons)) {
                ++mismatched_blocks;
                bisect_fix(alice_key, out.corrected_bob, perm, lo, hi, channel,
                           out.parity_comparisons);
            }
        }
        clean_rounds = mismatched_blocks == 0 ? clean_rounds + 1 : 0;
        out.hamming_by_round.push_back(hamming_distance(alice_key, out.corrected_bob));
    }

    if (clean_rounds < params.agree_rounds_needed) {
        raise(Errc::NotConverged, "no " + std::to_string(params.agree_rounds_needed) +
                                      " consecutive clean rounds within " +
                                      std::to_string(params.max_rounds) + " rounds");
    }
    out.converged = true;
    return out;
}

} // namespace qkd
