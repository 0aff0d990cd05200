#pragma once

#include <cstddef>
#include <optional>

#include "qkd/bits.hpp"
#include "qkd/channel.hpp"
#include "qkd/privacy_amp.hpp"
#include "qkd/rng.hpp"

namespace qkd {

// How the authentication key K_a is obtained from the distilled key K.
// OddPosition splits K into disjoint halves (1-indexed odd positions form
// K_a); HashDerived compresses K to ka_len bits with a fresh public Toeplitz
// seed and leaves K_m = K untouched.
enum class SplitRule : std::uint8_t { OddPosition, HashDerived };

struct AuthParams {
    SplitRule rule = SplitRule::OddPosition;
    std::size_t ka_len = 128; // HashDerived only
    std::size_t tag_len = 16;
    std::size_t nonce_len = 16;
};

enum class AuthVerdict : std::uint8_t { Accept, Abort };

struct KeySplit {
    BitVec k_a;
    BitVec k_m;
};

KeySplit split_key_odd(const BitVec& k);
KeySplit split_key_hashed(const BitVec& k, std::size_t ka_len, const ToeplitzSeed& seed);

// Dispatch on params.rule; `seed` is required for HashDerived and ignored
// otherwise.
KeySplit split_key(const BitVec& k, const AuthParams& params, const ToeplitzSeed* seed = nullptr);

// Inverse of the odd/even split: interleave(k_a, k_m) reconstructs k.
BitVec interleave(const BitVec& k_a, const BitVec& k_m);

// One-time Toeplitz-hash tag: the diagonal is the first
// len(message) + tag_len - 1 bits of k_a. Throws KEY_TOO_SHORT when k_a
// cannot cover the window.
BitVec mac_tag(const BitVec& k_a, const BitVec& message, std::size_t tag_len);

// One endpoint of the challenge-response run. A side without key material
// (the forger) answers challenges with uniform guesses from its stream and
// accepts whatever it is shown.
struct AuthSide {
    std::optional<BitVec> k_a;
    RandomStream* rng = nullptr;
};

// Mutual challenge-response: Alice sends nonce N_A; Bob answers with
// tag(N_A || role_B) and nonce N_B; Alice verifies, answers with
// tag(N_B || role_A); Bob verifies. ACCEPT iff both checks pass. The deciding
// party announces the verdict on the channel and an ABORT closes it.
AuthVerdict verify_identity(const AuthSide& alice, const AuthSide& bob, PublicChannel& channel,
                            const AuthParams& params);

// Honest form: both parties hold their derived k_a.
AuthVerdict verify_identity(const BitVec& k_a_alice, const BitVec& k_a_bob,
                            PublicChannel& channel, RandomStream& rng, const AuthParams& params);

} // namespace qkd
