#include "qkd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "qkd/adversary.hpp"
#include "qkd/errors.hpp"
#include "qkd/privacy_amp.hpp"

namespace qkd {

const char* auth_outcome_name(AuthOutcome v) {
    switch (v) {
    case AuthOutcome::Accept:
        return "ACCEPT";
    case AuthOutcome::Abort:
        return "ABORT";
    case AuthOutcome::NotRun:
        return "NOT_RUN";
    }
    return "?";
}

void validate_config(const SessionConfig& cfg) {
    std::vector<std::string> problems;
    auto check = [&](bool ok, const char* field, const std::string& why) {
        if (!ok) {
            problems.push_back(std::string(field) + ": " + why);
        }
    };

    check(cfg.n_photons >= 64, "n_photons", "must be >= 64");
    check(cfg.channel.flip_prob >= 0.0 && cfg.channel.flip_prob <= 1.0, "flip_prob",
          "must lie in [0, 1]");
    check(cfg.channel.loss_prob >= 0.0 && cfg.channel.loss_prob <= 1.0, "loss_prob",
          "must lie in [0, 1]");
    check(cfg.sample_fraction > 0.0 && cfg.sample_fraction < 1.0, "sample_fraction",
          "must lie in (0, 1)");
    check(cfg.safety_s >= 1, "safety_s", "must be >= 1");
    check(cfg.adversary.intercept_fraction >= 0.0 && cfg.adversary.intercept_fraction <= 1.0,
          "intercept_fraction", "must lie in [0, 1]");
    check(cfg.auth.tag_len >= 8, "tag_len", "must be >= 8");
    check(cfg.auth.nonce_len >= 16, "nonce_len", "must be >= 16");
    if (cfg.auth.rule == SplitRule::HashDerived) {
        check(cfg.auth.ka_len >= cfg.auth.tag_len + cfg.auth.nonce_len - 1, "ka_len",
              "must be >= tag_len + nonce_len - 1");
    }
    check(cfg.recon.agree_rounds_needed >= 1, "agree_rounds", "must be >= 1");
    check(cfg.recon.max_rounds >= cfg.recon.agree_rounds_needed, "max_rounds",
          "must be >= agree_rounds");
    check(cfg.recon.initial_block_size == kAutoBlockSize || cfg.recon.initial_block_size >= 2,
          "block_size", "must be auto or >= 2");

    if (!problems.empty()) {
        std::string what;
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i > 0) {
                what += "; ";
            }
            what += problems[i];
        }
        raise(Errc::ConfigInvalid, what);
    }
}

QuantumPhaseResult quantum_phase(const SessionConfig& cfg, RandomStream& root, EveState* eve) {
    RandomStream alice_rng(root.fork_seed());
    RandomStream bob_rng(root.fork_seed());
    RandomStream channel_rng(root.fork_seed());
    RandomStream eve_rng(root.fork_seed());

    const bool intercepting = cfg.adversary.kind == AdversaryKind::InterceptResend;

    QuantumPhaseResult out;
    out.alice_bits.reserve(cfg.n_photons);
    out.alice_bases.reserve(cfg.n_photons);
    out.bob_bases.reserve(cfg.n_photons);
    out.detections.reserve(cfg.n_photons);

    for (std::size_t i = 0; i < cfg.n_photons; ++i) {
        const Bit bit = alice_rng.next_bit();
        const Basis basis = random_basis(alice_rng);
        out.alice_bits.push_back(bit);
        out.alice_bases.push_back(basis);

        PhotonState photon = prepare(bit, basis);
        if (intercepting && eve_rng.bernoulli(cfg.adversary.intercept_fraction)) {
            photon = eve ? intercept_resend(photon, eve_rng, *eve, i)
                         : intercept_resend(photon, eve_rng);
        }

        const auto received = transmit(photon, cfg.channel, channel_rng);
        const Basis bob_basis = random_basis(bob_rng);
        out.bob_bases.push_back(bob_basis);
        if (received) {
            out.detections.push_back(Detection{measure(*received, bob_basis, bob_rng), bob_basis});
        } else {
            out.detections.push_back(Detection{std::nullopt, bob_basis});
        }
    }
    return out;
}

std::vector<std::size_t> sift(const std::vector<Basis>& alice_bases,
                              const std::vector<Basis>& bob_bases,
                              const std::vector<Detection>& detections) {
    if (alice_bases.size() != bob_bases.size() || alice_bases.size() != detections.size()) {
        raise(Errc::LengthMismatch, "sift inputs must have equal length");
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < alice_bases.size(); ++i) {
        if (detections[i].outcome.has_value() && alice_bases[i] == bob_bases[i]) {
            kept.push_back(i);
        }
    }
    return kept;
}

QberEstimate estimate_qber(const BitVec& alice_sifted, const BitVec& bob_sifted,
                           double sample_fraction, RandomStream& rng) {
    const std::size_t len = alice_sifted.size();
    if (len != bob_sifted.size()) {
        raise(Errc::LengthMismatch, "sifted keys of lengths " + std::to_string(len) + " and " +
                                        std::to_string(bob_sifted.size()));
    }
    if (len == 0) {
        raise(Errc::EmptyKey, "no sifted key to sample");
    }
    const auto sample_size =
        static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(len)));

    std::vector<std::size_t> indices(len);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    for (std::size_t i = 0; i < sample_size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(len - i));
        std::swap(indices[i], indices[j]);
    }

    QberEstimate out;
    out.sampled_positions.assign(indices.begin(),
                                 indices.begin() + static_cast<std::ptrdiff_t>(sample_size));
    std::sort(out.sampled_positions.begin(), out.sampled_positions.end());

    std::size_t mismatches = 0;
    std::vector<bool> sampled(len, false);
    for (std::size_t pos : out.sampled_positions) {
        sampled[pos] = true;
        mismatches += static_cast<std::size_t>(alice_sifted[pos] != bob_sifted[pos]);
    }
    out.qber_est = static_cast<double>(mismatches) / static_cast<double>(sample_size);

    out.remaining_alice.reserve(len - sample_size);
    out.remaining_bob.reserve(len - sample_size);
    for (std::size_t i = 0; i < len; ++i) {
        if (!sampled[i]) {
            out.remaining_alice.push_back(alice_sifted[i]);
            out.remaining_bob.push_back(bob_sifted[i]);
        }
    }
    return out;
}

namespace {

Bytes bases_payload(const std::vector<Detection>& detections) {
    Bytes payload;
    payload.reserve(detections.size());
    for (const auto& d : detections) {
        payload.push_back(d.outcome.has_value() ? static_cast<std::uint8_t>(d.basis_used)
                                                : std::uint8_t{0xff});
    }
    return payload;
}

Bytes index_payload(const std::vector<std::size_t>& indices) {
    Bytes payload;
    put_u32(payload, static_cast<std::uint32_t>(indices.size()));
    for (std::size_t i : indices) {
        put_u32(payload, static_cast<std::uint32_t>(i));
    }
    return payload;
}

Bytes sample_disclosure_payload(const std::vector<std::size_t>& positions, const BitVec& values) {
    Bytes payload;
    put_u32(payload, static_cast<std::uint32_t>(positions.size()));
    for (std::size_t p : positions) {
        put_u32(payload, static_cast<std::uint32_t>(p));
    }
    put_u32(payload, static_cast<std::uint32_t>(values.size()));
    payload.insert(payload.end(), values.begin(), values.end());
    return payload;
}

Bytes sample_echo_payload(const BitVec& values) {
    Bytes payload;
    put_u32(payload, 0); // no new positions disclosed
    put_u32(payload, static_cast<std::uint32_t>(values.size()));
    payload.insert(payload.end(), values.begin(), values.end());
    return payload;
}

Bytes toeplitz_payload(const ToeplitzSeed& seed) {
    Bytes payload;
    put_u32(payload, static_cast<std::uint32_t>(seed.bits.size()));
    const Bytes packed = pack_bits(seed.bits);
    payload.insert(payload.end(), packed.begin(), packed.end());
    return payload;
}

BitVec select(const BitVec& bits, const std::vector<std::size_t>& indices) {
    BitVec out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        out.push_back(bits[i]);
    }
    return out;
}

// Compresses both parties' keys with one disclosed seed. Returns false when
// the length rule admits no output (s >= n - t): nothing distillable, the
// session completes keyless.
bool amplify(const BitVec& w_alice, const BitVec& w_bob, std::size_t t, std::size_t s,
             RandomStream& proto, PublicChannel& channel, BitVec& out_alice, BitVec& out_bob) {
    const std::size_t n = w_alice.size();
    if (n == 0 || t >= n || s >= n - t) {
        return false;
    }
    const std::size_t r = output_length(n, t, s);
    const ToeplitzSeed seed = random_toeplitz_seed(n, r, proto);
    channel.send(Party::Alice, Party::Bob, MessageKind::PaSeed, toeplitz_payload(seed));
    out_alice = compress(w_alice, seed, r);
    out_bob = compress(w_bob, seed, r);
    return true;
}

// Derives (K_a, K_m) on both sides. The hash-derived rule discloses a fresh
// 64-bit seed and expands it to the Toeplitz diagonal on both ends.
void split_both(const SessionConfig& cfg, const BitVec& k_alice, const BitVec& k_bob,
                RandomStream& proto, PublicChannel& channel, KeyLedger& alice, KeyLedger& bob) {
    if (cfg.auth.rule == SplitRule::OddPosition) {
        const KeySplit sa = split_key_odd(k_alice);
        const KeySplit sb = split_key_odd(k_bob);
        alice.k_a = sa.k_a;
        alice.k_m = sa.k_m;
        bob.k_a = sb.k_a;
        bob.k_m = sb.k_m;
        return;
    }
    const std::uint64_t derivation_seed = proto.next_u64();
    Bytes payload;
    put_u64(payload, derivation_seed);
    channel.send(Party::Alice, Party::Bob, MessageKind::PermutationSeed, std::move(payload));
    RandomStream expand(derivation_seed);
    const ToeplitzSeed seed = random_toeplitz_seed(k_alice.size(), cfg.auth.ka_len, expand);
    const KeySplit sa = split_key_hashed(k_alice, cfg.auth.ka_len, seed);
    const KeySplit sb = split_key_hashed(k_bob, cfg.auth.ka_len, seed);
    alice.k_a = sa.k_a;
    alice.k_m = sa.k_m;
    bob.k_a = sb.k_a;
    bob.k_m = sb.k_m;
}

// Mutual challenge-response on the derived K_a. The endpoint Eve occupies
// gets no key material: her tags are uniform guesses from her own stream.
AuthVerdict run_verification(const SessionConfig& cfg, EveEndpoint eve_as, SessionOutcome& out,
                             RandomStream& proto, RandomStream& eve_classical,
                             PublicChannel& channel) {
    const std::size_t window = cfg.auth.nonce_len + 8 + cfg.auth.tag_len - 1;
    if (out.alice.k_a.size() < window || out.bob.k_a.size() < window) {
        raise(Errc::InsufficientKey, "K_a of " + std::to_string(out.alice.k_a.size()) +
                                         " bits cannot cover the MAC window of " +
                                         std::to_string(window) + " bits");
    }
    AuthSide alice{out.alice.k_a, &proto};
    AuthSide bob{out.bob.k_a, &proto};
    if (eve_as == EveEndpoint::AsAlice) {
        alice.k_a.reset();
        alice.rng = &eve_classical;
    } else if (eve_as == EveEndpoint::AsBob) {
        bob.k_a.reset();
        bob.rng = &eve_classical;
    }
    return verify_identity(alice, bob, channel, cfg.auth);
}

} // namespace

SessionOutcome execute_session(const SessionConfig& cfg, std::uint64_t seed, EveEndpoint eve_as,
                               KeyLedger* eve_ledger) {
    RandomStream root(seed);
    EveState quantum_eve;
    const QuantumPhaseResult qp = quantum_phase(cfg, root, &quantum_eve);
    RandomStream proto(root.fork_seed());
    RandomStream eve_classical(root.fork_seed());

    SessionOutcome out;
    PublicChannel channel;

    out.alice.raw_bits = qp.alice_bits;
    out.alice.raw_bases = qp.alice_bases;
    out.bob.raw_bases = qp.bob_bases;
    out.bob.detections = qp.detections;
    out.bob.raw_bits.resize(qp.detections.size(), 0);
    for (std::size_t i = 0; i < qp.detections.size(); ++i) {
        if (qp.detections[i].outcome) {
            out.bob.raw_bits[i] = *qp.detections[i].outcome;
        }
    }

    auto finish = [&](AuthOutcome verdict, bool keys_match) {
        out.report.auth_verdict = verdict;
        out.report.keys_match = keys_match;
        out.report.leak_t = channel.transcript().count_kind(MessageKind::Parity);
        out.alice.leak_t = out.report.leak_t;
        out.bob.leak_t = out.report.leak_t;
        out.report.r_final = out.alice.final_key.size();
        if (eve_ledger) {
            *eve_ledger = eve_as == EveEndpoint::AsAlice ? out.alice : out.bob;
        }
        out.transcript = channel.transcript();
        return out;
    };

    // -- data sifting: Bob announces bases and losses, Alice the kept indices
    channel.send(Party::Bob, Party::Alice, MessageKind::Bases, bases_payload(qp.detections));
    const auto kept = sift(qp.alice_bases, qp.bob_bases, qp.detections);
    channel.send(Party::Alice, Party::Bob, MessageKind::SiftIndices, index_payload(kept));

    out.alice.sifted = select(qp.alice_bits, kept);
    out.bob.sifted.reserve(kept.size());
    for (std::size_t i : kept) {
        out.bob.sifted.push_back(*qp.detections[i].outcome);
    }

    out.report.sifted_fraction =
        static_cast<double>(kept.size()) / static_cast<double>(cfg.n_photons);
    if (kept.empty()) {
        raise(Errc::InsufficientKey, "no photon survived sifting");
    }
    out.report.qber_true = static_cast<double>(hamming_distance(out.alice.sifted, out.bob.sifted)) /
                           static_cast<double>(kept.size());

    // -- error-rate estimation on a disclosed sample, removed from the key
    const QberEstimate est =
        estimate_qber(out.alice.sifted, out.bob.sifted, cfg.sample_fraction, proto);
    channel.send(Party::Alice, Party::Bob, MessageKind::QberSample,
                 sample_disclosure_payload(est.sampled_positions,
                                           select(out.alice.sifted, est.sampled_positions)));
    channel.send(Party::Bob, Party::Alice, MessageKind::QberSample,
                 sample_echo_payload(select(out.bob.sifted, est.sampled_positions)));
    out.report.qber_est = est.qber_est;
    out.alice.qber_est = est.qber_est;
    out.bob.qber_est = est.qber_est;

    if (est.remaining_alice.size() < 4) {
        raise(Errc::InsufficientKey, "key too short after sampling: " +
                                         std::to_string(est.remaining_alice.size()) + " bits");
    }

    // -- interactive error correction
    ReconOutcome recon;
    try {
        recon = reconcile(est.remaining_alice, est.remaining_bob, est.qber_est, cfg.recon,
                          channel, proto);
    } catch (const Error& e) {
        if (e.code() == Errc::NotConverged) {
            // Parities never settled; the parties give up without a key.
            return finish(AuthOutcome::NotRun, false);
        }
        if (e.code() == Errc::KeyTooShort) {
            raise(Errc::InsufficientKey, e.what());
        }
        throw;
    }
    out.alice.corrected = recon.corrected_alice;
    out.bob.corrected = recon.corrected_bob;
    const std::size_t leak_t = recon.parity_comparisons;

    try {
        switch (cfg.variant) {
        case Variant::Baseline: {
            const bool ok = amplify(out.alice.corrected, out.bob.corrected, leak_t, cfg.safety_s,
                                    proto, channel, out.alice.final_key, out.bob.final_key);
            const bool match =
                ok && !out.alice.final_key.empty() && out.alice.final_key == out.bob.final_key;
            return finish(AuthOutcome::NotRun, match);
        }
        case Variant::AuthLast: {
            const bool ok = amplify(out.alice.corrected, out.bob.corrected, leak_t, cfg.safety_s,
                                    proto, channel, out.alice.final_key, out.bob.final_key);
            if (!ok) {
                return finish(AuthOutcome::NotRun, false);
            }
            split_both(cfg, out.alice.final_key, out.bob.final_key, proto, channel, out.alice,
                       out.bob);
            const AuthVerdict verdict = run_verification(cfg, eve_as, out, proto, eve_classical,
                                                         channel);
            if (verdict == AuthVerdict::Abort) {
                out.alice.final_key.clear();
                out.bob.final_key.clear();
                return finish(AuthOutcome::Abort, false);
            }
            // K_m is the final secret; K_a is consumed by the verification.
            out.alice.final_key = out.alice.k_m;
            out.bob.final_key = out.bob.k_m;
            const bool match =
                !out.alice.final_key.empty() && out.alice.final_key == out.bob.final_key;
            return finish(AuthOutcome::Accept, match);
        }
        case Variant::AuthBeforePa: {
            split_both(cfg, out.alice.corrected, out.bob.corrected, proto, channel, out.alice,
                       out.bob);
            const AuthVerdict verdict = run_verification(cfg, eve_as, out, proto, eve_classical,
                                                         channel);
            if (verdict == AuthVerdict::Abort) {
                return finish(AuthOutcome::Abort, false);
            }
            const bool ok = amplify(out.alice.k_m, out.bob.k_m, leak_t, cfg.safety_s, proto,
                                    channel, out.alice.final_key, out.bob.final_key);
            const bool match =
                ok && !out.alice.final_key.empty() && out.alice.final_key == out.bob.final_key;
            return finish(AuthOutcome::Accept, match);
        }
        }
    } catch (const Error& e) {
        if (e.code() == Errc::KeyTooShort) {
            raise(Errc::InsufficientKey, e.what());
        }
        throw;
    }
    raise(Errc::ConfigInvalid, "unknown variant");
}

SessionOutcome run_session_detailed(const SessionConfig& cfg) {
    validate_config(cfg);
    if (cfg.adversary.kind == AdversaryKind::Impersonate) {
        ImpersonationOutcome imp = impersonate(cfg);
        SessionOutcome out = std::move(imp.alice_side);
        const bool eve_matches_alice = !out.alice.final_key.empty() &&
                                       imp.eve.session_ab.final_key == out.alice.final_key;
        const bool eve_matches_bob = !imp.bob_side.bob.final_key.empty() &&
                                     imp.eve.session_eb.final_key == imp.bob_side.bob.final_key;
        out.report.eve_key_match = eve_matches_alice || eve_matches_bob;
        return out;
    }
    return execute_session(cfg, cfg.seed, EveEndpoint::None);
}

SessionReport run_session(const SessionConfig& cfg) {
    return run_session_detailed(cfg).report;
}

} // namespace qkd
