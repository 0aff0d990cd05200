#pragma once

#include <cstddef>

#include "qkd/bits.hpp"
#include "qkd/rng.hpp"

namespace qkd {

// Length rule for compressing the reconciled key: r = n - t - s, defined only
// for s < n - t.
struct CompressionSpec {
    std::size_t n; // reconciled key length
    std::size_t t; // bits charged to Eve
    std::size_t s; // safety parameter
    std::size_t r; // output length
};

std::size_t output_length(std::size_t n, std::size_t t, std::size_t s); // SAFETY_VIOLATION if s >= n - t
CompressionSpec make_compression_spec(std::size_t n, std::size_t t, std::size_t s);

// A binary Toeplitz matrix described by its n + r - 1 diagonal bits; row i of
// the matrix is seed[i .. i+n).
struct ToeplitzSeed {
    BitVec bits;
};

ToeplitzSeed random_toeplitz_seed(std::size_t n, std::size_t r, RandomStream& rng);

// output[i] = parity of sum_j seed[i + j] * w[j] over j < n. Linear over
// GF(2); collision probability 2^-r for distinct inputs.
BitVec compress(const BitVec& w, const ToeplitzSeed& seed, std::size_t r);

// Bound on Eve's residual information about the compressed key, in bits:
// 2^-s / ln 2. Reported as a bound, never as a measurement.
double eve_info_bound_bits(std::size_t s);

} // namespace qkd
