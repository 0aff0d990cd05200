#include "qkd/auth.hpp"

#include <string>

#include "qkd/errors.hpp"

namespace qkd {

namespace {

constexpr std::uint8_t kRoleAlice = 0x41; // 'A'
constexpr std::uint8_t kRoleBob = 0x42;   // 'B'

BitVec role_bits(std::uint8_t role) {
    BitVec out(8);
    for (std::size_t i = 0; i < 8; ++i) {
        out[i] = (role >> (7 - i)) & 1u;
    }
    return out;
}

BitVec concat(const BitVec& a, const BitVec& b) {
    BitVec out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Bytes bit_field(const BitVec& bits) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(bits.size()));
    const Bytes packed = pack_bits(bits);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

BitVec read_bit_field(const Bytes& payload, std::size_t& offset) {
    const std::uint32_t count = get_u32(payload, offset);
    offset += 4;
    const std::size_t byte_count = (count + 7) / 8;
    if (offset + byte_count > payload.size()) {
        raise(Errc::OutOfRange, "truncated bit field in auth payload");
    }
    Bytes packed(payload.begin() + static_cast<std::ptrdiff_t>(offset),
                 payload.begin() + static_cast<std::ptrdiff_t>(offset + byte_count));
    offset += byte_count;
    return unpack_bits(packed, count);
}

Bytes verdict_payload(AuthVerdict v) {
    const std::string text = v == AuthVerdict::Accept ? "ACCEPT" : "ABORT";
    return Bytes(text.begin(), text.end());
}

// The forger holds no k_a: her tags are uniform guesses and she accepts
// whatever tag she is shown.
BitVec side_tag(const AuthSide& side, const BitVec& message, std::size_t tag_len) {
    if (side.k_a) {
        return mac_tag(*side.k_a, message, tag_len);
    }
    return side.rng->next_bits(tag_len);
}

bool side_verifies(const AuthSide& side, const BitVec& message, const BitVec& shown_tag,
                   std::size_t tag_len) {
    if (!side.k_a) {
        return true;
    }
    return mac_tag(*side.k_a, message, tag_len) == shown_tag;
}

} // namespace

KeySplit split_key_odd(const BitVec& k) {
    if (k.size() < 2) {
        raise(Errc::KeyTooShort, "odd-position split needs at least 2 bits, got " +
                                     std::to_string(k.size()));
    }
    KeySplit out;
    out.k_a.reserve((k.size() + 1) / 2);
    out.k_m.reserve(k.size() / 2);
    for (std::size_t i = 0; i < k.size(); ++i) {
        // 1-indexed odd positions are even indices
        if (i % 2 == 0) {
            out.k_a.push_back(k[i]);
        } else {
            out.k_m.push_back(k[i]);
        }
    }
    return out;
}

KeySplit split_key_hashed(const BitVec& k, std::size_t ka_len, const ToeplitzSeed& seed) {
    if (k.size() < ka_len + 1) {
        raise(Errc::KeyTooShort, "hash-derived split needs more than ka_len = " +
                                     std::to_string(ka_len) + " bits, got " +
                                     std::to_string(k.size()));
    }
    return KeySplit{compress(k, seed, ka_len), k};
}

KeySplit split_key(const BitVec& k, const AuthParams& params, const ToeplitzSeed* seed) {
    if (params.rule == SplitRule::OddPosition) {
        return split_key_odd(k);
    }
    if (seed == nullptr) {
        raise(Errc::DimensionMismatch, "hash-derived split requires a public seed");
    }
    return split_key_hashed(k, params.ka_len, *seed);
}

BitVec interleave(const BitVec& k_a, const BitVec& k_m) {
    if (k_a.size() != k_m.size() && k_a.size() != k_m.size() + 1) {
        raise(Errc::LengthMismatch, "interleave needs |k_a| in {|k_m|, |k_m|+1}");
    }
    BitVec out;
    out.reserve(k_a.size() + k_m.size());
    for (std::size_t i = 0; i < k_a.size(); ++i) {
        out.push_back(k_a[i]);
        if (i < k_m.size()) {
            out.push_back(k_m[i]);
        }
    }
    return out;
}

BitVec mac_tag(const BitVec& k_a, const BitVec& message, std::size_t tag_len) {
    const std::size_t window = message.size() + tag_len - 1;
    if (k_a.size() < window) {
        raise(Errc::KeyTooShort, "mac needs " + std::to_string(window) + " key bits, got " +
                                     std::to_string(k_a.size()));
    }
    ToeplitzSeed seed{BitVec(k_a.begin(), k_a.begin() + static_cast<std::ptrdiff_t>(window))};
    return compress(message, seed, tag_len);
}

AuthVerdict verify_identity(const AuthSide& alice, const AuthSide& bob, PublicChannel& channel,
                            const AuthParams& params) {
    const BitVec nonce_a = alice.rng->next_bits(params.nonce_len);
    channel.send(Party::Alice, Party::Bob, MessageKind::AuthChallenge, bit_field(nonce_a));

    const BitVec tag_b = side_tag(bob, concat(nonce_a, role_bits(kRoleBob)), params.tag_len);
    const BitVec nonce_b = bob.rng->next_bits(params.nonce_len);
    Bytes response_b = bit_field(tag_b);
    const Bytes nonce_field = bit_field(nonce_b);
    response_b.insert(response_b.end(), nonce_field.begin(), nonce_field.end());
    const PublicMessage delivered_b =
        channel.send(Party::Bob, Party::Alice, MessageKind::AuthResponse, std::move(response_b));

    std::size_t offset = 0;
    const BitVec shown_tag_b = read_bit_field(delivered_b.payload, offset);
    const BitVec shown_nonce_b = read_bit_field(delivered_b.payload, offset);

    if (!side_verifies(alice, concat(nonce_a, role_bits(kRoleBob)), shown_tag_b,
                       params.tag_len)) {
        channel.send(Party::Alice, Party::Bob, MessageKind::Verdict,
                     verdict_payload(AuthVerdict::Abort));
        channel.close();
        return AuthVerdict::Abort;
    }

    const BitVec tag_a =
        side_tag(alice, concat(shown_nonce_b, role_bits(kRoleAlice)), params.tag_len);
    const PublicMessage delivered_a =
        channel.send(Party::Alice, Party::Bob, MessageKind::AuthResponse, bit_field(tag_a));

    offset = 0;
    const BitVec shown_tag_a = read_bit_field(delivered_a.payload, offset);
    const bool bob_ok =
        side_verifies(bob, concat(nonce_b, role_bits(kRoleAlice)), shown_tag_a, params.tag_len);
    channel.send(Party::Bob, Party::Alice, MessageKind::Verdict,
                 verdict_payload(bob_ok ? AuthVerdict::Accept : AuthVerdict::Abort));
    if (!bob_ok) {
        channel.close();
        return AuthVerdict::Abort;
    }
    return AuthVerdict::Accept;
}

AuthVerdict verify_identity(const BitVec& k_a_alice, const BitVec& k_a_bob,
                            PublicChannel& channel, RandomStream& rng,
                            const AuthParams& params) {
    const AuthSide alice{k_a_alice, &rng};
    const AuthSide bob{k_a_bob, &rng};
    return verify_identity(alice, bob, channel, params);
}

} // namespace qkd
