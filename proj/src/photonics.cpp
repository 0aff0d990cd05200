#include "qkd/photonics.hpp"

namespace qkd {

PhotonState prepare(Bit bit, Basis basis) {
    return PhotonState{basis, static_cast<Bit>(bit & 1u)};
}

std::optional<PhotonState> transmit(const PhotonState& state, const ChannelParams& ch,
                                    RandomStream& rng) {
    if (rng.bernoulli(ch.loss_prob)) {
        return std::nullopt;
    }
    PhotonState out = state;
    if (rng.bernoulli(ch.flip_prob)) {
        out.bit ^= 1u;
    }
    return out;
}

Bit measure(const PhotonState& state, Basis basis, RandomStream& rng) {
    if (basis == state.basis) {
        return state.bit;
    }
    // Conjugate observables: the stored bit is randomized completely.
    return rng.next_bit();
}

Basis random_basis(RandomStream& rng) {
    return rng.next_bit() ? Basis::Circular : Basis::Linear;
}

Basis conjugate(Basis b) {
    return b == Basis::Linear ? Basis::Circular : Basis::Linear;
}

} // namespace qkd
