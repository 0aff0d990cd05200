#include <doctest.h>

#include <cmath>

#include "qkd/errors.hpp"
#include "qkd/pipeline.hpp"
#include "qkd/reconciliation.hpp"

using namespace qkd;

namespace {

SessionConfig noiseless_config(std::size_t n_photons, Variant variant, std::uint64_t seed) {
    SessionConfig cfg;
    cfg.n_photons = n_photons;
    cfg.channel = ChannelParams{0.0, 0.0};
    cfg.variant = variant;
    cfg.safety_s = 16;
    cfg.seed = seed;
    return cfg;
}

std::uint64_t first_seq_of(const Transcript& t, MessageKind kind) {
    for (const auto& e : t.entries) {
        if (e.msg.kind == kind) {
            return e.msg.seq;
        }
    }
    return ~std::uint64_t{0};
}

} // namespace

TEST_CASE("quantum phase: lossless channel detects every photon") {
    SessionConfig cfg = noiseless_config(10000, Variant::Baseline, 1);
    RandomStream root(cfg.seed);
    const auto qp = quantum_phase(cfg, root);
    for (const auto& d : qp.detections) {
        CHECK(d.outcome.has_value());
    }
}

TEST_CASE("quantum phase: bases are balanced") {
    SessionConfig cfg = noiseless_config(100000, Variant::Baseline, 2);
    RandomStream root(cfg.seed);
    const auto qp = quantum_phase(cfg, root);
    std::size_t alice_linear = 0;
    std::size_t bob_linear = 0;
    for (std::size_t i = 0; i < cfg.n_photons; ++i) {
        alice_linear += static_cast<std::size_t>(qp.alice_bases[i] == Basis::Linear);
        bob_linear += static_cast<std::size_t>(qp.bob_bases[i] == Basis::Linear);
    }
    CHECK(std::abs(static_cast<double>(alice_linear) / cfg.n_photons - 0.5) < 0.01);
    CHECK(std::abs(static_cast<double>(bob_linear) / cfg.n_photons - 0.5) < 0.01);
}

TEST_CASE("quantum phase: losses follow the binomial oracle") {
    SessionConfig cfg = noiseless_config(10000, Variant::Baseline, 3);
    cfg.channel.loss_prob = 0.5;
    RandomStream root(cfg.seed);
    const auto qp = quantum_phase(cfg, root);
    std::size_t present = 0;
    for (const auto& d : qp.detections) {
        present += static_cast<std::size_t>(d.outcome.has_value());
    }
    CHECK(std::abs(static_cast<double>(present) / cfg.n_photons - 0.5) < 0.03);
}

TEST_CASE("sift keeps exactly the detected matching-basis positions") {
    const std::vector<Basis> alice{Basis::Linear, Basis::Linear, Basis::Circular,
                                   Basis::Circular};
    const std::vector<Basis> bob_match = alice;
    std::vector<Detection> all_detected;
    for (Basis b : bob_match) {
        all_detected.push_back(Detection{Bit{0}, b});
    }
    CHECK(sift(alice, bob_match, all_detected) == std::vector<std::size_t>{0, 1, 2, 3});

    const std::vector<Basis> bob_conjugate{Basis::Circular, Basis::Circular, Basis::Linear,
                                           Basis::Linear};
    std::vector<Detection> conj_detected;
    for (Basis b : bob_conjugate) {
        conj_detected.push_back(Detection{Bit{0}, b});
    }
    CHECK(sift(alice, bob_conjugate, conj_detected).empty());

    std::vector<Detection> with_loss = all_detected;
    with_loss[1].outcome.reset();
    CHECK(sift(alice, bob_match, with_loss) == std::vector<std::size_t>{0, 2, 3});

    CHECK_THROWS_AS(sift(alice, bob_match, std::vector<Detection>(3)), Error);
}

TEST_CASE("sift rate approaches the basis-match probability") {
    SessionConfig cfg = noiseless_config(10000, Variant::Baseline, 4);
    RandomStream root(cfg.seed);
    const auto qp = quantum_phase(cfg, root);
    const auto kept = sift(qp.alice_bases, qp.bob_bases, qp.detections);
    CHECK(std::abs(static_cast<double>(kept.size()) / cfg.n_photons - 0.5) < 0.02);
}

TEST_CASE("qber estimation on identical and complementary keys") {
    RandomStream rng(5);
    const BitVec key = rng.next_bits(512);
    const auto same = estimate_qber(key, key, 0.25, rng);
    CHECK(same.qber_est == 0.0);
    CHECK(same.sampled_positions.size() == 128);
    CHECK(same.remaining_alice.size() == 384);

    BitVec complement = key;
    for (auto& b : complement) {
        b ^= 1u;
    }
    const auto opposite = estimate_qber(key, complement, 0.25, rng);
    CHECK(opposite.qber_est == 1.0);

    CHECK_THROWS_AS(estimate_qber(BitVec{}, BitVec{}, 0.25, rng), Error);
    CHECK_THROWS_AS(estimate_qber(key, rng.next_bits(13), 0.25, rng), Error);
}

TEST_CASE("qber estimate tracks the true rate") {
    RandomStream rng(7);
    const std::size_t len = 8000;
    const BitVec alice = rng.next_bits(len);
    BitVec bob = alice;
    for (std::size_t i = 0; i < len; ++i) {
        if (rng.bernoulli(0.25)) {
            bob[i] ^= 1u;
        }
    }
    const auto est = estimate_qber(alice, bob, 0.25, rng);
    CHECK(std::abs(est.qber_est - 0.25) < 0.03);
    // removed positions leave both remainders aligned
    CHECK(est.remaining_alice.size() == est.remaining_bob.size());
    CHECK(est.remaining_alice.size() == len - est.sampled_positions.size());
}

TEST_CASE("noiseless honest baseline run") {
    const SessionConfig cfg = noiseless_config(4096, Variant::Baseline, 11);
    const SessionOutcome out = run_session_detailed(cfg);

    CHECK(out.report.qber_true == 0.0);
    CHECK(out.report.qber_est == 0.0);
    CHECK(out.report.keys_match);
    CHECK(out.report.auth_verdict == AuthOutcome::NotRun);
    CHECK_FALSE(out.report.eve_key_match);
    CHECK_FALSE(out.report.k_a_reused);

    // clean reconciliation: agree_rounds x ceil(len / block) parity checks
    const std::size_t len = out.alice.corrected.size();
    const std::size_t block = auto_block_size(0.0, len);
    const std::size_t expected_leak =
        cfg.recon.agree_rounds_needed * ((len + block - 1) / block);
    CHECK(out.report.leak_t == expected_leak);

    // conservation: sifted = corrected + disclosed sample
    CHECK(out.alice.sifted.size() ==
          out.alice.corrected.size() +
              static_cast<std::size_t>(std::ceil(cfg.sample_fraction *
                                                 static_cast<double>(out.alice.sifted.size()))));

    CHECK(out.report.r_final == len - out.report.leak_t - cfg.safety_s);
    CHECK(out.alice.final_key == out.bob.final_key);
    CHECK(out.alice.final_key.size() == out.report.r_final);
}

TEST_CASE("identical seeds give identical sessions, different seeds differ") {
    const SessionConfig cfg = noiseless_config(1024, Variant::AuthBeforePa, 13);
    const SessionOutcome a = run_session_detailed(cfg);
    const SessionOutcome b = run_session_detailed(cfg);

    CHECK(a.report.sifted_fraction == b.report.sifted_fraction);
    CHECK(a.report.qber_true == b.report.qber_true);
    CHECK(a.report.qber_est == b.report.qber_est);
    CHECK(a.report.leak_t == b.report.leak_t);
    CHECK(a.report.r_final == b.report.r_final);
    CHECK(a.alice.final_key == b.alice.final_key);
    CHECK(transcript_to_string(a.transcript) == transcript_to_string(b.transcript));

    SessionConfig other = cfg;
    other.seed = 14;
    const SessionOutcome c = run_session_detailed(other);
    CHECK(transcript_to_string(a.transcript) != transcript_to_string(c.transcript));
}

TEST_CASE("auth-last runs PA before the challenge and releases K_m") {
    const SessionConfig cfg = noiseless_config(2048, Variant::AuthLast, 17);
    const SessionOutcome out = run_session_detailed(cfg);

    CHECK(out.report.auth_verdict == AuthOutcome::Accept);
    CHECK(out.report.keys_match);
    CHECK(out.alice.final_key == out.alice.k_m);
    CHECK(out.report.r_final == out.alice.k_m.size());

    const auto pa_seq = first_seq_of(out.transcript, MessageKind::PaSeed);
    const auto challenge_seq = first_seq_of(out.transcript, MessageKind::AuthChallenge);
    REQUIRE(pa_seq != ~std::uint64_t{0});
    REQUIRE(challenge_seq != ~std::uint64_t{0});
    CHECK(pa_seq < challenge_seq);
}

TEST_CASE("auth-before-pa verifies identity before any PA seed is disclosed") {
    for (SplitRule rule : {SplitRule::OddPosition, SplitRule::HashDerived}) {
        SessionConfig cfg = noiseless_config(2048, Variant::AuthBeforePa, 19);
        cfg.auth.rule = rule;
        cfg.auth.ka_len = 64;
        const SessionOutcome out = run_session_detailed(cfg);

        CHECK(out.report.auth_verdict == AuthOutcome::Accept);
        CHECK(out.report.keys_match);
        CHECK(out.report.r_final > 0);
        CHECK(out.alice.final_key == out.bob.final_key);

        const auto pa_seq = first_seq_of(out.transcript, MessageKind::PaSeed);
        std::uint64_t verdict_seq = ~std::uint64_t{0};
        for (const auto& e : out.transcript.entries) {
            if (e.msg.kind == MessageKind::Verdict) {
                verdict_seq = e.msg.seq;
                break;
            }
        }
        REQUIRE(pa_seq != ~std::uint64_t{0});
        REQUIRE(verdict_seq != ~std::uint64_t{0});
        CHECK(verdict_seq < pa_seq);
    }
}

TEST_CASE("hash-derived split feeds PA with the whole reconciled key") {
    SessionConfig cfg = noiseless_config(2048, Variant::AuthBeforePa, 23);
    cfg.auth.rule = SplitRule::HashDerived;
    cfg.auth.ka_len = 64;
    const SessionOutcome out = run_session_detailed(cfg);
    CHECK(out.alice.k_m == out.alice.corrected);
    CHECK(out.alice.k_a.size() == 64);
    CHECK(out.report.auth_verdict == AuthOutcome::Accept);
}

TEST_CASE("moderate noise still completes with matching keys") {
    int matched = 0;
    const int sessions = 100;
    for (int i = 0; i < sessions; ++i) {
        SessionConfig cfg = noiseless_config(2048, Variant::Baseline, 500 + i);
        cfg.channel.flip_prob = 0.02;
        const SessionReport report = run_session(cfg);
        CHECK(std::abs(report.qber_true - 0.02) < 0.03);
        matched += static_cast<int>(report.keys_match);
    }
    CHECK(matched == sessions);
}

TEST_CASE("leak exceeding the key completes keyless instead of crashing") {
    SessionConfig cfg = noiseless_config(512, Variant::Baseline, 29);
    cfg.channel.flip_prob = 0.25; // bisection discloses more than the key holds
    const SessionReport report = run_session(cfg);
    CHECK(report.r_final == 0);
    CHECK_FALSE(report.keys_match);
}

TEST_CASE("a fully lossy channel cannot yield a key") {
    SessionConfig cfg = noiseless_config(256, Variant::Baseline, 31);
    cfg.channel.loss_prob = 1.0;
    try {
        run_session(cfg);
        FAIL("expected INSUFFICIENT_KEY");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientKey);
    }
}

TEST_CASE("config validation lists every offending field") {
    SessionConfig cfg;
    cfg.n_photons = 10;
    cfg.sample_fraction = 0.0;
    cfg.safety_s = 0;
    try {
        validate_config(cfg);
        FAIL("expected CONFIG_INVALID");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigInvalid);
        const std::string what = e.what();
        CHECK(what.find("n_photons") != std::string::npos);
        CHECK(what.find("sample_fraction") != std::string::npos);
        CHECK(what.find("safety_s") != std::string::npos);
    }
}

TEST_CASE("ledger invariant: leak stays below the corrected length when PA runs") {
    for (std::uint64_t seed : {41ull, 43ull, 47ull}) {
        SessionConfig cfg = noiseless_config(2048, Variant::Baseline, seed);
        cfg.channel.flip_prob = 0.01;
        const SessionOutcome out = run_session_detailed(cfg);
        if (out.report.r_final > 0) {
            CHECK(out.report.leak_t < out.alice.corrected.size());
        }
    }
}
