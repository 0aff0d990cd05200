#pragma once

#include <cstddef>
#include <vector>

#include "qkd/channel.hpp"
#include "qkd/session.hpp"

namespace qkd {

struct EveState; // adversary.hpp

struct QuantumPhaseResult {
    BitVec alice_bits;
    std::vector<Basis> alice_bases;
    std::vector<Basis> bob_bases;
    std::vector<Detection> detections;
};

// Alice prepares n_photons uniform (bit, basis) pairs; each photon passes the
// adversary's quantum interposition, then the noisy channel, then Bob's
// uniformly chosen measurement apparatus. Forks the per-actor streams from
// `root` in a fixed order, so a session is replayable from its seed.
QuantumPhaseResult quantum_phase(const SessionConfig& cfg, RandomStream& root,
                                 EveState* eve = nullptr);

// Indices where the photon was detected and the bases match.
std::vector<std::size_t> sift(const std::vector<Basis>& alice_bases,
                              const std::vector<Basis>& bob_bases,
                              const std::vector<Detection>& detections);

struct QberEstimate {
    double qber_est = 0.0;
    BitVec remaining_alice;
    BitVec remaining_bob;
    std::vector<std::size_t> sampled_positions; // disclosed count = size()
};

// Publicly compares ceil(sample_fraction * len) uniformly chosen positions
// and removes them from both keys.
QberEstimate estimate_qber(const BitVec& alice_sifted, const BitVec& bob_sifted,
                           double sample_fraction, RandomStream& rng);

struct SessionOutcome {
    SessionReport report;
    KeyLedger alice;
    KeyLedger bob;
    Transcript transcript;
};

// Executes the configured variant end to end. An ABORT verdict halts the
// session immediately with r_final = 0. Fully deterministic given cfg.seed.
SessionOutcome run_session_detailed(const SessionConfig& cfg);
SessionReport run_session(const SessionConfig& cfg);

// Internal executor shared by honest runs and impersonation sub-sessions:
// `eve_as` names the endpoint the adversary occupies (she plays it honestly
// but cannot compute authentication tags). `eve_ledger`, when non-null,
// receives a copy of the ledger of the endpoint she played.
enum class EveEndpoint : std::uint8_t { None, AsBob, AsAlice };
SessionOutcome execute_session(const SessionConfig& cfg, std::uint64_t seed,
                               EveEndpoint eve_as, KeyLedger* eve_ledger = nullptr);

} // namespace qkd
