#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qkd {

using Bit = std::uint8_t; // value in {0, 1}
using BitVec = std::vector<Bit>;
using Bytes = std::vector<std::uint8_t>;

Bit parity_of(const BitVec& bits, std::size_t lo, std::size_t hi); // over [lo, hi)
std::size_t hamming_distance(const BitVec& a, const BitVec& b);

// Bit sequences travel packed MSB-first with zero padding in the last byte;
// the receiver recovers the exact length from the protocol context.
Bytes pack_bits(const BitVec& bits);
BitVec unpack_bits(const Bytes& bytes, std::size_t bit_count);

std::string to_hex(const Bytes& bytes);

std::string to_bit_string(const BitVec& bits);
BitVec bits_from_string(const std::string& s); // "10110100" -> {1,0,1,1,0,1,0,0}

// Big-endian integer fields inside message payloads.
void put_u32(Bytes& out, std::uint32_t v);
std::uint32_t get_u32(const Bytes& in, std::size_t offset);
void put_u64(Bytes& out, std::uint64_t v);
std::uint64_t get_u64(const Bytes& in, std::size_t offset);

} // namespace qkd
