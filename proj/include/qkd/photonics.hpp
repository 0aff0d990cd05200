#pragma once

#include <optional>

#include "qkd/bits.hpp"
#include "qkd/rng.hpp"

namespace qkd {

// The two conjugate polarization bases: linear (horizontal/vertical) and
// circular (left/right). Measuring in the wrong basis yields a uniformly
// random outcome.
enum class Basis : std::uint8_t { Linear = 0, Circular = 1 };

// One of the four signal states: preparation basis plus encoded bit.
struct PhotonState {
    Basis basis;
    Bit bit;
    bool operator==(const PhotonState&) const = default;
};

// Independent bit-flip within the preparation basis plus independent erasure.
struct ChannelParams {
    double flip_prob = 0.0;
    double loss_prob = 0.0;
};

// Outcome is absent exactly when the photon was lost in the channel.
struct Detection {
    std::optional<Bit> outcome;
    Basis basis_used;
};

PhotonState prepare(Bit bit, Basis basis);

// Returns nullopt with probability loss_prob; otherwise flips the bit with
// probability flip_prob. The basis is never altered.
std::optional<PhotonState> transmit(const PhotonState& state, const ChannelParams& ch,
                                    RandomStream& rng);

// Matched basis reproduces the encoded bit deterministically; a conjugate
// basis yields 0 or 1 with probability 1/2 each.
Bit measure(const PhotonState& state, Basis basis, RandomStream& rng);

Basis random_basis(RandomStream& rng);
Basis conjugate(Basis b);

} // namespace qkd
