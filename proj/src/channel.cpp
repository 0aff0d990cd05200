#include "qkd/channel.hpp"

#include <ostream>
#include <sstream>
#include <utility>

#include "qkd/errors.hpp"

namespace qkd {

const char* party_name(Party p) {
    return p == Party::Alice ? "A" : "B";
}

const char* kind_name(MessageKind k) {
    switch (k) {
    case MessageKind::Bases:
        return "BASES";
    case MessageKind::SiftIndices:
        return "SIFT_INDICES";
    case MessageKind::QberSample:
        return "QBER_SAMPLE";
    case MessageKind::Parity:
        return "PARITY";
    case MessageKind::ParityReply:
        return "PARITY_REPLY";
    case MessageKind::PermutationSeed:
        return "PERMUTATION_SEED";
    case MessageKind::PaSeed:
        return "PA_SEED";
    case MessageKind::AuthChallenge:
        return "AUTH_CHALLENGE";
    case MessageKind::AuthResponse:
        return "AUTH_RESPONSE";
    case MessageKind::Verdict:
        return "VERDICT";
    }
    return "?";
}

std::size_t Transcript::count_kind(MessageKind k) const {
    std::size_t n = 0;
    for (const auto& e : entries) {
        if (!e.intercepted && e.msg.kind == k) {
            ++n;
        }
    }
    return n;
}

std::size_t transcript_leak_bits(const Transcript& t) {
    std::size_t leak = 0;
    for (const auto& e : t.entries) {
        if (e.intercepted) {
            continue;
        }
        if (e.msg.kind == MessageKind::Parity) {
            // One announced block parity plus its reply is one comparison.
            ++leak;
        } else if (e.msg.kind == MessageKind::QberSample) {
            // Leading u32 counts the key positions this message opens; the
            // echo of the same positions carries zero.
            if (e.msg.payload.size() >= 4) {
                leak += get_u32(e.msg.payload, 0);
            }
        }
    }
    return leak;
}

void serialize_transcript(const Transcript& t, std::ostream& out) {
    for (const auto& e : t.entries) {
        out << e.msg.seq << ' ' << party_name(e.msg.sender) << ' ' << party_name(e.msg.receiver)
            << ' ' << kind_name(e.msg.kind) << ' ' << to_hex(e.msg.payload) << '\n';
    }
}

std::string transcript_to_string(const Transcript& t) {
    std::ostringstream os;
    serialize_transcript(t, os);
    return os.str();
}

PublicChannel::PublicChannel(Observer observer) : observer_(std::move(observer)) {}

PublicChannel::PublicChannel(InterpositionMode mode, Substituter hook)
    : mode_(mode), substituter_(std::move(hook)) {}

PublicMessage PublicChannel::send(Party sender, Party receiver, MessageKind kind, Bytes payload) {
    if (closed_) {
        raise(Errc::SessionClosed, "send on an aborted session");
    }
    PublicMessage msg{sender, receiver, next_seq_++, kind, std::move(payload)};

    if (mode_ == InterpositionMode::Mitm && substituter_) {
        PublicMessage forged = substituter_(msg);
        // the adversary controls the payload; the envelope stays pinned
        forged.sender = msg.sender;
        forged.receiver = msg.receiver;
        forged.seq = msg.seq;
        if (!(forged == msg)) {
            if (forged.kind != msg.kind) {
                raise(Errc::ConfigInvalid, "adversary may only substitute a message of the "
                                           "same kind");
            }
            transcript_.entries.push_back({msg, true});
            forged.seq = next_seq_++;
            transcript_.entries.push_back({forged, false});
            return forged;
        }
    }

    if (observer_) {
        observer_(msg);
    }
    transcript_.entries.push_back({msg, false});
    return msg;
}

} // namespace qkd
