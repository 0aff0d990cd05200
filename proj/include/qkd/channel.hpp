#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qkd/bits.hpp"

namespace qkd {

enum class Party : std::uint8_t { Alice, Bob };

enum class MessageKind : std::uint8_t {
    Bases,
    SiftIndices,
    QberSample,
    Parity,
    ParityReply,
    PermutationSeed,
    PaSeed,
    AuthChallenge,
    AuthResponse,
    Verdict,
};

const char* party_name(Party p);       // "A" / "B"
const char* kind_name(MessageKind k);  // "BASES", "PARITY", ...

struct PublicMessage {
    Party sender;
    Party receiver;
    std::uint64_t seq = 0;
    MessageKind kind;
    Bytes payload;

    bool operator==(const PublicMessage&) const = default;
};

// Every classical exchange of a session, in delivery order. An entry flagged
// `intercepted` is an original that an active adversary replaced in flight;
// the substituted form follows it with the next sequence number.
struct TranscriptEntry {
    PublicMessage msg;
    bool intercepted = false;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;

    std::size_t size() const { return entries.size(); }
    std::size_t count_kind(MessageKind k) const;
};

// Disclosure charged to Eve: one bit per delivered block-parity comparison
// plus one bit per key position opened during error-rate sampling.
std::size_t transcript_leak_bits(const Transcript& t);

// Line-delimited records, one message per line:
//   <seq> <sender> <receiver> <kind> <payload-hex>
void serialize_transcript(const Transcript& t, std::ostream& out);
std::string transcript_to_string(const Transcript& t);

enum class InterpositionMode : std::uint8_t { Passive, Mitm };

// The open classical channel. PASSIVE mode delivers verbatim and hands the
// adversary a copy of each message; MITM mode routes each message through a
// substitution hook that may replace it with one of the same kind.
class PublicChannel {
public:
    using Observer = std::function<void(const PublicMessage&)>;
    using Substituter = std::function<PublicMessage(const PublicMessage&)>;

    PublicChannel() = default;
    explicit PublicChannel(Observer observer);
    PublicChannel(InterpositionMode mode, Substituter hook);

    // Delivers the message (possibly substituted) and records it; returns the
    // delivered form. Throws SESSION_CLOSED after close().
    PublicMessage send(Party sender, Party receiver, MessageKind kind, Bytes payload);

    void close() { closed_ = true; }
    bool closed() const { return closed_; }

    const Transcript& transcript() const { return transcript_; }

private:
    Transcript transcript_;
    InterpositionMode mode_ = InterpositionMode::Passive;
    Observer observer_;
    Substituter substituter_;
    std::uint64_t next_seq_ = 0;
    bool closed_ = false;
};

} // namespace qkd
