#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pdqrng {

/// Read-only view of a bit string stored most-significant-bit first in bytes.
class BitView {
public:
    BitView() = default;
    BitView(std::span<const std::uint8_t> bytes, std::size_t bit_count, std::size_t bit_offset = 0);

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool operator[](std::size_t i) const noexcept {
        const std::size_t p = offset_ + i;
        return (bytes_[p >> 3] >> (7 - (p & 7))) & 1u;
    }

    BitView subview(std::size_t begin, std::size_t count) const;

    /// Up to 64 bits starting at `pos`, right-aligned; missing tail bits read as zero.
    std::uint64_t word(std::size_t pos, unsigned count = 64) const noexcept;

    std::size_t count_ones() const noexcept;

    /// Number of positions i in [1, size) with bit[i] != bit[i-1].
    std::size_t count_transitions() const noexcept;

private:
    std::span<const std::uint8_t> bytes_{};
    std::size_t size_ = 0;
    std::size_t offset_ = 0;
};

/// Growable bit string, packed MSB first; the tail byte is zero padded.
class BitBuffer {
public:
    BitBuffer() = default;
    BitBuffer(std::vector<std::uint8_t> bytes, std::size_t bit_count);

    void push_back(bool bit);
    /// Appends the low `count` bits of `value`, most significant first.
    void append(std::uint64_t value, unsigned count);
    /// Appends the first `count` bits of an MSB-first byte string.
    void append_bytes(std::span<const std::uint8_t> src, std::size_t count);
    void reserve_bits(std::size_t count) { bytes_.reserve((count + 7) / 8); }

    std::size_t size() const noexcept { return size_; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
    BitView view() const noexcept { return BitView(bytes_, size_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

} // namespace pdqrng
