#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkd/auth.hpp"
#include "qkd/photonics.hpp"
#include "qkd/reconciliation.hpp"

namespace qkd {

// Step orderings. Baseline has no identity verification; AuthLast runs it
// after privacy amplification; AuthBeforePa runs it on the reconciled key so
// an impersonator is caught before any compression work.
enum class Variant : std::uint8_t { Baseline, AuthLast, AuthBeforePa };

enum class AdversaryKind : std::uint8_t { None, InterceptResend, Impersonate };

struct AdversaryStrategy {
    AdversaryKind kind = AdversaryKind::None;
    double intercept_fraction = 1.0; // InterceptResend only
};

struct SessionConfig {
    std::size_t n_photons = 4096;
    ChannelParams channel;
    AdversaryStrategy adversary;
    Variant variant = Variant::Baseline;
    std::size_t safety_s = 64;
    double sample_fraction = 0.25;
    AuthParams auth;
    ReconParams recon;
    std::uint64_t seed = 12345;
};

// Throws CONFIG_INVALID listing every offending field.
void validate_config(const SessionConfig& cfg);

// One party's evolving key material across the pipeline.
struct KeyLedger {
    BitVec raw_bits;
    std::vector<Basis> raw_bases;
    std::vector<Detection> detections; // Bob side only
    BitVec sifted;
    double qber_est = 0.0;
    BitVec corrected;       // W, the reconciled key
    std::size_t leak_t = 0; // t, parity comparisons charged to Eve
    BitVec k_a;
    BitVec k_m;
    BitVec final_key; // K = G(W), length r
};

enum class AuthOutcome : std::uint8_t { Accept, Abort, NotRun };

const char* auth_outcome_name(AuthOutcome v);

struct SessionReport {
    double sifted_fraction = 0.0;
    double qber_true = 0.0;
    double qber_est = 0.0;
    std::size_t leak_t = 0;
    std::size_t r_final = 0;
    bool keys_match = false;
    AuthOutcome auth_verdict = AuthOutcome::NotRun;
    // Whether the adversary ended the run holding a key equal to either
    // party's final key.
    bool eve_key_match = false;
    // One-time-use guard: true would mean a consumed K_a was reused.
    bool k_a_reused = false;
    std::string transcript_path;
};

} // namespace qkd
