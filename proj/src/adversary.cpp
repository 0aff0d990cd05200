#include "qkd/adversary.hpp"

#include "qkd/errors.hpp"

namespace qkd {

PhotonState intercept_resend(const PhotonState& photon, RandomStream& rng) {
    const Basis eve_basis = random_basis(rng);
    const Bit outcome = measure(photon, eve_basis, rng);
    return prepare(outcome, eve_basis);
}

PhotonState intercept_resend(const PhotonState& photon, RandomStream& rng, EveState& eve,
                             std::size_t photon_index) {
    const Basis eve_basis = random_basis(rng);
    const Bit outcome = measure(photon, eve_basis, rng);
    eve.observed_bits.push_back(InterceptRecord{photon_index, eve_basis, outcome});
    return prepare(outcome, eve_basis);
}

ImpersonationOutcome impersonate(const SessionConfig& cfg) {
    if (cfg.adversary.kind != AdversaryKind::Impersonate) {
        raise(Errc::ConfigInvalid, "impersonate requires adversary=impersonate");
    }
    // Two complete, independent protocol instances: Eve plays Bob toward
    // Alice and Alice toward Bob, honestly except for tag forging.
    RandomStream root(cfg.seed);
    const std::uint64_t seed_toward_alice = root.fork_seed();
    const std::uint64_t seed_toward_bob = root.fork_seed();

    SessionConfig sub = cfg;
    sub.adversary.kind = AdversaryKind::None;

    ImpersonationOutcome out;
    out.alice_side =
        execute_session(sub, seed_toward_alice, EveEndpoint::AsBob, &out.eve.session_ab);
    out.bob_side =
        execute_session(sub, seed_toward_bob, EveEndpoint::AsAlice, &out.eve.session_eb);
    return out;
}

} // namespace qkd
