#include "qkd/privacy_amp.hpp"

#include <cmath>

#include "qkd/errors.hpp"

namespace qkd {

std::size_t output_length(std::size_t n, std::size_t t, std::size_t s) {
    if (t >= n || s >= n - t) {
        raise(Errc::SafetyViolation, "no secure key distillable: n=" + std::to_string(n) +
                                         " t=" + std::to_string(t) + " s=" + std::to_string(s) +
                                         " requires s < n - t");
    }
    return n - t - s;
}

CompressionSpec make_compression_spec(std::size_t n, std::size_t t, std::size_t s) {
    return CompressionSpec{n, t, s, output_length(n, t, s)};
}

ToeplitzSeed random_toeplitz_seed(std::size_t n, std::size_t r, RandomStream& rng) {
    return ToeplitzSeed{rng.next_bits(n + r - 1)};
}

BitVec compress(const BitVec& w, const ToeplitzSeed& seed, std::size_t r) {
    const std::size_t n = w.size();
    if (n == 0 || r == 0) {
        raise(Errc::DimensionMismatch, "compress requires n >= 1 and r >= 1");
    }
    if (seed.bits.size() != n + r - 1) {
        raise(Errc::DimensionMismatch, "seed length " + std::to_string(seed.bits.size()) +
                                           " != n + r - 1 = " + std::to_string(n + r - 1));
    }
    BitVec out(r, 0);
    for (std::size_t i = 0; i < r; ++i) {
        Bit acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            acc ^= static_cast<Bit>(seed.bits[i + j] & w[j]);
        }
        out[i] = acc;
    }
    return out;
}

double eve_info_bound_bits(std::size_t s) {
    return std::exp2(-static_cast<double>(s)) / std::log(2.0);
}

} // namespace qkd
