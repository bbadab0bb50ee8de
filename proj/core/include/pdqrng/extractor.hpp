#pragma once

#include "pdqrng/bits.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdqrng::extractor {

struct ExtractionConfig {
    int input_bits_per_sample = 14;  // b
    double reduction_factor = 2.0;   // RF = b / H
    std::string hash = "whirlpool";  // any 512-bit digest known to OpenSSL
    std::size_t block_bits = 512;    // input bits per hash call, multiple of 8
    unsigned threads = 1;

    /// Throws ConfigError when RF < 1, the hash is unknown or not 512 bits wide,
    /// or a block could ask for more bits than one digest holds.
    void validate() const;
};

/// 512-bit digests accepted by ExtractionConfig::hash.
std::vector<std::string> supported_hashes();

/// Big-endian concatenation of the low `bits` bits of each sample, zero padded
/// to a byte boundary. Throws ValidationError if a sample needs more than `bits` bits.
std::vector<std::uint8_t> pack_samples(std::span<const std::uint16_t> samples, int bits);

/// Inverse of pack_samples for `count` samples.
std::vector<std::uint16_t> unpack_samples(std::span<const std::uint8_t> bytes, std::size_t count, int bits);

/// Output bits contributed by block `index`; the running total after n blocks
/// is floor(n * block_bits / RF).
std::size_t block_output_bits(std::size_t index, std::size_t block_bits, double reduction_factor) noexcept;

struct ExtractionResult {
    BitBuffer bits;
    std::size_t blocks = 0;
    std::size_t input_bits = 0;
    std::size_t dropped_bits = 0;     // trailing partial block
    std::size_t dropped_samples = 0;  // samples not fully consumed by a hashed block
};

/// Packs the samples, hashes each full block and keeps the leading
/// block_output_bits() bits of each digest. Deterministic and independent of
/// the thread count. Throws ConfigError if not even one block is available.
ExtractionResult extract(std::span<const std::uint16_t> samples, const ExtractionConfig& cfg);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

} // namespace pdqrng::extractor
