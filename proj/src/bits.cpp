#include "qkd/bits.hpp"

#include <stdexcept>

#include "qkd/errors.hpp"

namespace qkd {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::LengthMismatch:
        return "LENGTH_MISMATCH";
    case Errc::OutOfRange:
        return "OUT_OF_RANGE";
    case Errc::ParityAgrees:
        return "PARITY_AGREES";
    case Errc::NotConverged:
        return "NOT_CONVERGED";
    case Errc::SafetyViolation:
        return "SAFETY_VIOLATION";
    case Errc::DimensionMismatch:
        return "DIMENSION_MISMATCH";
    case Errc::KeyTooShort:
        return "KEY_TOO_SHORT";
    case Errc::EmptyKey:
        return "EMPTY_KEY";
    case Errc::SessionClosed:
        return "SESSION_CLOSED";
    case Errc::InsufficientKey:
        return "INSUFFICIENT_KEY";
    case Errc::ConfigInvalid:
        return "CONFIG_INVALID";
    }
    return "UNKNOWN";
}

Bit parity_of(const BitVec& bits, std::size_t lo, std::size_t hi) {
    if (lo > hi || hi > bits.size()) {
        raise(Errc::OutOfRange, "parity range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                    ") exceeds length " + std::to_string(bits.size()));
    }
    Bit p = 0;
    for (std::size_t i = lo; i < hi; ++i) {
        p ^= bits[i];
    }
    return p;
}

std::size_t hamming_distance(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) {
        raise(Errc::LengthMismatch, "hamming_distance over lengths " + std::to_string(a.size()) +
                                        " and " + std::to_string(b.size()));
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += static_cast<std::size_t>(a[i] != b[i]);
    }
    return d;
}

Bytes pack_bits(const BitVec& bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
        }
    }
    return out;
}

BitVec unpack_bits(const Bytes& bytes, std::size_t bit_count) {
    if (bit_count > bytes.size() * 8) {
        raise(Errc::OutOfRange, "unpack of " + std::to_string(bit_count) + " bits from " +
                                    std::to_string(bytes.size()) + " bytes");
    }
    BitVec out(bit_count);
    for (std::size_t i = 0; i < bit_count; ++i) {
        out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    }
    return out;
}

std::string to_hex(const Bytes& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

std::string to_bit_string(const BitVec& bits) {
    std::string out;
    out.reserve(bits.size());
    for (Bit b : bits) {
        out.push_back(b ? '1' : '0');
    }
    return out;
}

BitVec bits_from_string(const std::string& s) {
    BitVec out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit string may contain only 0 and 1");
        }
        out.push_back(static_cast<Bit>(c - '0'));
    }
    return out;
}

void put_u32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const Bytes& in, std::size_t offset) {
    if (offset + 4 > in.size()) {
        raise(Errc::OutOfRange, "u32 read at offset " + std::to_string(offset));
    }
    return (static_cast<std::uint32_t>(in[offset]) << 24) |
           (static_cast<std::uint32_t>(in[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(in[offset + 2]) << 8) |
           static_cast<std::uint32_t>(in[offset + 3]);
}

void put_u64(Bytes& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v));
}

std::uint64_t get_u64(const Bytes& in, std::size_t offset) {
    return (static_cast<std::uint64_t>(get_u32(in, offset)) << 32) | get_u32(in, offset + 4);
}

} // namespace qkd
