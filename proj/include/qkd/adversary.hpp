#pragma once

#include <cstddef>
#include <vector>

#include "qkd/photonics.hpp"
#include "qkd/pipeline.hpp"
#include "qkd/session.hpp"

namespace qkd {

struct InterceptRecord {
    std::size_t photon_index;
    Basis basis;
    Bit bit;
};

struct EveState {
    std::vector<InterceptRecord> observed_bits;
    KeyLedger session_ab; // Eve playing Bob toward Alice
    KeyLedger session_eb; // Eve playing Alice toward Bob
};

// Eve measures in a uniformly random basis and re-prepares a fresh photon
// carrying her outcome in her basis. With a matched basis the forwarded
// photon is identical to the original.
PhotonState intercept_resend(const PhotonState& photon, RandomStream& rng);
PhotonState intercept_resend(const PhotonState& photon, RandomStream& rng, EveState& eve,
                             std::size_t photon_index);

struct ImpersonationOutcome {
    EveState eve;
    SessionOutcome alice_side; // Alice <-> Eve-as-Bob
    SessionOutcome bob_side;   // Eve-as-Alice <-> Bob
};

// Full impersonation: Eve runs two complete, independent protocol instances,
// playing each sub-protocol honestly except that she cannot compute
// authentication tags and guesses them uniformly.
ImpersonationOutcome impersonate(const SessionConfig& cfg);

} // namespace qkd
