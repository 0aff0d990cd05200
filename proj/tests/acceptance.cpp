// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkd/adversary.hpp"
#include "qkd/errors.hpp"
#include "qkd/harness.hpp"
#include "qkd/pipeline.hpp"
#include "qkd/privacy_amp.hpp"

using namespace qkd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
    std::printf("%s  %2d. %-28s %s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

SessionConfig clean_config(std::size_t n_photons, Variant variant, std::uint64_t seed) {
    SessionConfig cfg;
    cfg.n_photons = n_photons;
    cfg.channel = ChannelParams{0.0, 0.0};
    cfg.variant = variant;
    cfg.safety_s = 16;
    cfg.seed = seed;
    return cfg;
}

double sifted_qber(const SessionConfig& cfg) {
    RandomStream root(cfg.seed);
    const auto qp = quantum_phase(cfg, root);
    const auto kept = sift(qp.alice_bases, qp.bob_bases, qp.detections);
    std::size_t errors = 0;
    for (std::size_t i : kept) {
        errors += static_cast<std::size_t>(qp.alice_bits[i] != *qp.detections[i].outcome);
    }
    return static_cast<double>(errors) / static_cast<double>(kept.size());
}

// 1. n=1e5 photons, no loss, no adversary: sifted_fraction in 0.5 +- 0.01,
//    under 5 s.
void criterion_sifting_rate() {
    const auto start = std::chrono::steady_clock::now();
    SessionConfig cfg = clean_config(100000, Variant::Baseline, 101);
    RandomStream root(cfg.seed);
    const auto qp = quantum_phase(cfg, root);
    const auto kept = sift(qp.alice_bases, qp.bob_bases, qp.detections);
    const double fraction = static_cast<double>(kept.size()) / cfg.n_photons;
    const double elapsed = seconds_since(start);
    const bool pass = std::abs(fraction - 0.5) <= 0.01 && elapsed < 5.0;
    report(1, "sifting rate", pass,
           "sifted_fraction=" + fmt(fraction) + " elapsed=" + fmt(elapsed) + "s");
}

// 2. flip_prob=0, BASELINE: qber_true = 0, keys_match, leak_t equals the
//    parity comparisons of agree_rounds_needed clean rounds.
void criterion_noiseless_run() {
    const SessionConfig cfg = clean_config(4096, Variant::Baseline, 202);
    const SessionOutcome out = run_session_detailed(cfg);
    const std::size_t len = out.alice.corrected.size();
    const std::size_t block = auto_block_size(0.0, len);
    const std::size_t expected_leak =
        cfg.recon.agree_rounds_needed * ((len + block - 1) / block);
    const bool pass = out.report.qber_true == 0.0 && out.report.keys_match &&
                      out.report.leak_t == expected_leak;
    report(2, "noiseless honest run", pass,
           "qber_true=" + fmt(out.report.qber_true) +
               " keys_match=" + (out.report.keys_match ? "true" : "false") +
               " leak_t=" + std::to_string(out.report.leak_t) + " expected=" +
               std::to_string(expected_leak));
}

// 3. Intercept-resend signature: QBER f/4 +- 0.01 for f in {1.0, 0.5, 0.25}
//    at n=1e5 (exhaustive 8-case enumeration gives the f/4 law).
void criterion_intercept_signature() {
    bool pass = true;
    std::string detail;
    const double fractions[] = {1.0, 0.5, 0.25};
    std::uint64_t seed = 303;
    for (double f : fractions) {
        SessionConfig cfg = clean_config(100000, Variant::Baseline, seed++);
        cfg.adversary = AdversaryStrategy{AdversaryKind::InterceptResend, f};
        const double qber = sifted_qber(cfg);
        pass = pass && std::abs(qber - f / 4.0) <= 0.01;
        detail += "f=" + fmt(f) + ":qber=" + fmt(qber) + " ";
    }
    report(3, "intercept-resend signature", pass, detail);
}

// 4. 200 seeded reconciliation trials at n=4096, QBER 0.05, AUTO blocks:
//    equal keys in >= 198, Hamming distance non-increasing in every trial.
void criterion_reconciliation() {
    int equal = 0;
    bool monotone = true;
    for (int trial = 0; trial < 200; ++trial) {
        RandomStream rng(4000 + trial);
        const BitVec alice = rng.next_bits(4096);
        BitVec bob = alice;
        for (std::size_t i = 0; i < bob.size(); ++i) {
            if (rng.bernoulli(0.05)) {
                bob[i] ^= 1u;
            }
        }
        PublicChannel channel;
        try {
            const ReconOutcome out = reconcile(alice, bob, 0.05, ReconParams{}, channel, rng);
            equal += static_cast<int>(out.corrected_bob == alice);
            for (std::size_t r = 1; r < out.hamming_by_round.size(); ++r) {
                monotone = monotone && out.hamming_by_round[r] <= out.hamming_by_round[r - 1];
            }
        } catch (const Error&) {
        }
    }
    const bool pass = equal >= 198 && monotone;
    report(4, "reconciliation convergence", pass,
           "equal=" + std::to_string(equal) + "/200 monotone=" + (monotone ? "true" : "false"));
}

// 5. output_length(1000,200,100) = 700; s >= n-t raises SAFETY_VIOLATION;
//    compress matches a dense matrix-product oracle on 100 random instances.
void criterion_pa_rule() {
    bool pass = output_length(1000, 200, 100) == 700;
    try {
        output_length(10, 5, 5);
        pass = false;
    } catch (const Error& e) {
        pass = pass && e.code() == Errc::SafetyViolation;
    }
    RandomStream rng(505);
    int oracle_matches = 0;
    for (int i = 0; i < 100; ++i) {
        const ToeplitzSeed seed = random_toeplitz_seed(32, 8, rng);
        const BitVec w = rng.next_bits(32);
        BitVec dense(8, 0);
        for (std::size_t row = 0; row < 8; ++row) {
            Bit acc = 0;
            for (std::size_t col = 0; col < 32; ++col) {
                acc ^= static_cast<Bit>(seed.bits[row + col] & w[col]);
            }
            dense[row] = acc;
        }
        oracle_matches += static_cast<int>(compress(w, seed, 8) == dense);
    }
    pass = pass && oracle_matches == 100;
    report(5, "PA length rule and oracle", pass,
           "oracle_matches=" + std::to_string(oracle_matches) + "/100");
}

// 6. Universality: fixed x != y at n=32, r=8 over 1e5 seeds, collision
//    fraction <= 2^-8 + 4*sqrt(2^-8/1e5).
void criterion_universality() {
    RandomStream rng(606);
    const BitVec x = rng.next_bits(32);
    BitVec y = x;
    y[5] ^= 1u;
    y[20] ^= 1u;
    const int trials = 100000;
    int collisions = 0;
    for (int i = 0; i < trials; ++i) {
        const ToeplitzSeed seed = random_toeplitz_seed(32, 8, rng);
        collisions += static_cast<int>(compress(x, seed, 8) == compress(y, seed, 8));
    }
    const double fraction = static_cast<double>(collisions) / trials;
    const double bound = std::exp2(-8) + 4.0 * std::sqrt(std::exp2(-8) / trials);
    const bool pass = fraction <= bound;
    report(6, "hash universality", pass,
           "collision_fraction=" + fmt(fraction) + " bound=" + fmt(bound));
}

// 7. ODD_POSITION split then re-interleave reconstructs 1000 random keys of
//    odd and even lengths; the worked example splits exactly.
void criterion_split() {
    const KeySplit example = split_key_odd(bits_from_string("10110100"));
    bool pass = example.k_a == bits_from_string("1100") &&
                example.k_m == bits_from_string("0110");
    RandomStream rng(707);
    int reconstructed = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t len = 2 + rng.next_below(255);
        const BitVec k = rng.next_bits(len);
        const KeySplit split = split_key_odd(k);
        reconstructed += static_cast<int>(interleave(split.k_a, split.k_m) == k);
    }
    pass = pass && reconstructed == 1000;
    report(7, "odd-position split", pass,
           "reconstructed=" + std::to_string(reconstructed) + "/1000");
}

// 8. BASELINE + IMPERSONATE, 100 trials: eve_key_match in 100/100 while both
//    honest parties see keys_match = true.
void criterion_vulnerability() {
    int eve_success = 0;
    int anomaly_free = 0;
    for (int trial = 0; trial < 100; ++trial) {
        SessionConfig cfg = clean_config(1024, Variant::Baseline, 8000 + trial);
        cfg.adversary.kind = AdversaryKind::Impersonate;
        const ImpersonationOutcome imp = impersonate(cfg);
        const bool eve_has_alice = !imp.alice_side.alice.final_key.empty() &&
                                   imp.eve.session_ab.final_key ==
                                       imp.alice_side.alice.final_key;
        const bool eve_has_bob = !imp.bob_side.bob.final_key.empty() &&
                                 imp.eve.session_eb.final_key == imp.bob_side.bob.final_key;
        eve_success += static_cast<int>(eve_has_alice && eve_has_bob);
        anomaly_free += static_cast<int>(imp.alice_side.report.keys_match &&
                                         imp.bob_side.report.keys_match);
    }
    const bool pass = eve_success == 100 && anomaly_free == 100;
    report(8, "impersonation vulnerability", pass,
           "eve_key_match=" + std::to_string(eve_success) + "/100 anomaly_free=" +
               std::to_string(anomaly_free) + "/100");
}

// 9. AUTH_BEFORE_PA + IMPERSONATE: accept fraction <= 2*2^-16 at tag_len=16
//    over 1e4 trials; within 2^-8 +- 3*sqrt(2^-8/1e4) at tag_len=8. Under 60s.
void criterion_improvement() {
    const auto start = std::chrono::steady_clock::now();
    const int trials = 10000;

    int accepts16 = 0;
    for (int trial = 0; trial < trials; ++trial) {
        SessionConfig cfg = clean_config(512, Variant::AuthBeforePa, 92000 + trial);
        cfg.adversary.kind = AdversaryKind::Impersonate;
        cfg.auth.tag_len = 16;
        accepts16 += static_cast<int>(run_session(cfg).auth_verdict == AuthOutcome::Accept);
    }
    const double fraction16 = static_cast<double>(accepts16) / trials;

    int accepts8 = 0;
    for (int trial = 0; trial < trials; ++trial) {
        SessionConfig cfg = clean_config(512, Variant::AuthBeforePa, 990000 + trial);
        cfg.adversary.kind = AdversaryKind::Impersonate;
        cfg.auth.tag_len = 8;
        accepts8 += static_cast<int>(run_session(cfg).auth_verdict == AuthOutcome::Accept);
    }
    const double fraction8 = static_cast<double>(accepts8) / trials;
    const double p8 = std::exp2(-8);
    const double band8 = 3.0 * std::sqrt(p8 / trials);
    const double elapsed = seconds_since(start);

    const bool pass = fraction16 <= 2.0 * std::exp2(-16) &&
                      std::abs(fraction8 - p8) <= band8 && elapsed < 60.0;
    report(9, "impersonation detection", pass,
           "accept16=" + fmt(fraction16) + " accept8=" + fmt(fraction8) + " (target " +
               fmt(p8) + "+-" + fmt(band8) + ") elapsed=" + fmt(elapsed) + "s");
}

// 10. Two cmd_montecarlo invocations with an identical spec produce
//     byte-identical CSV files.
void criterion_determinism() {
    BatchSpec spec;
    spec.base = clean_config(1024, Variant::AuthBeforePa, 10);
    spec.base.channel.flip_prob = 0.01;
    spec.trials = 25;
    spec.seed_base = 42;

    const fs::path base = fs::temp_directory_path() / "qkd_acceptance_determinism";
    fs::remove_all(base);
    std::ostringstream sink;
    cmd_montecarlo(spec, base / "a", sink);
    cmd_montecarlo(spec, base / "b", sink);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const std::string csv_a = slurp(base / "a" / "trials.csv");
    const std::string csv_b = slurp(base / "b" / "trials.csv");
    const bool pass = !csv_a.empty() && csv_a == csv_b;
    report(10, "batch determinism", pass,
           "bytes=" + std::to_string(csv_a.size()) +
               (csv_a == csv_b ? " identical" : " DIFFER"));
}

} // namespace

int main() {
    criterion_sifting_rate();
    criterion_noiseless_run();
    criterion_intercept_signature();
    criterion_reconciliation();
    criterion_pa_rule();
    criterion_universality();
    criterion_split();
    criterion_vulnerability();
    criterion_improvement();
    criterion_determinism();

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
