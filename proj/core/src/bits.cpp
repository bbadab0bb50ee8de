#include "pdqrng/bits.hpp"

#include "pdqrng/errors.hpp"

#include <bit>

namespace pdqrng {

BitView::BitView(std::span<const std::uint8_t> bytes, std::size_t bit_count, std::size_t bit_offset)
    : bytes_(bytes), size_(bit_count), offset_(bit_offset) {
    if (bit_offset + bit_count > bytes.size() * 8) {
        throw PreconditionError("BitView exceeds the underlying byte buffer");
    }
}

BitView BitView::subview(std::size_t begin, std::size_t count) const {
    if (begin + count > size_) {
        throw PreconditionError("BitView::subview out of range");
    }
    BitView v;
    v.bytes_ = bytes_;
    v.size_ = count;
    v.offset_ = offset_ + begin;
    return v;
}

std::uint64_t BitView::word(std::size_t pos, unsigned count) const noexcept {
    if (count == 0 || pos >= size_) {
        return 0;
    }
    std::uint64_t out = 0;
    std::size_t p = offset_ + pos;
    const std::size_t end = offset_ + size_;
    unsigned taken = 0;
    while (taken < count) {
        if (p >= end) {
            out <<= (count - taken);
            break;
        }
        const unsigned in_byte = static_cast<unsigned>(p & 7);
        unsigned n = 8 - in_byte;
        if (n > count - taken) n = count - taken;
        if (p + n > end) n = static_cast<unsigned>(end - p);
        const std::uint8_t b = bytes_[p >> 3];
        const std::uint64_t bits = (static_cast<unsigned>(b) >> (8 - in_byte - n)) & ((1u << n) - 1u);
        out = (out << n) | bits;
        taken += n;
        p += n;
    }
    return out;
}

std::size_t BitView::count_ones() const noexcept {
    std::size_t ones = 0;
    std::size_t pos = 0;
    while (pos + 64 <= size_) {
        ones += static_cast<std::size_t>(std::popcount(word(pos)));
        pos += 64;
    }
    if (pos < size_) {
        ones += static_cast<std::size_t>(std::popcount(word(pos, static_cast<unsigned>(size_ - pos))));
    }
    return ones;
}

std::size_t BitView::count_transitions() const noexcept {
    if (size_ < 2) {
        return 0;
    }
    // Compare each 63-bit window with itself shifted by one, stepping 63 bits.
    std::size_t transitions = 0;
    std::size_t pos = 0;
    while (pos + 1 < size_) {
        const unsigned len = static_cast<unsigned>(std::min<std::size_t>(64, size_ - pos));
        const std::uint64_t w = word(pos, len);
        const std::uint64_t diff = (w ^ (w >> 1)) & ((len == 64) ? ~0ULL >> 1 : ((1ULL << (len - 1)) - 1));
        transitions += static_cast<std::size_t>(std::popcount(diff));
        pos += len - 1;
    }
    return transitions;
}

BitBuffer::BitBuffer(std::vector<std::uint8_t> bytes, std::size_t bit_count)
    : bytes_(std::move(bytes)), size_(bit_count) {
    if (bit_count > bytes_.size() * 8) {
        throw PreconditionError("BitBuffer: bit count exceeds byte buffer");
    }
    bytes_.resize((bit_count + 7) / 8);
}

void BitBuffer::push_back(bool bit) {
    if ((size_ & 7) == 0) {
        bytes_.push_back(0);
    }
    if (bit) {
        bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (size_ & 7));
    }
    ++size_;
}

void BitBuffer::append(std::uint64_t value, unsigned count) {
    for (unsigned i = count; i-- > 0;) {
        push_back((value >> i) & 1u);
    }
}

void BitBuffer::append_bytes(std::span<const std::uint8_t> src, std::size_t count) {
    if (count > src.size() * 8) {
        throw PreconditionError("BitBuffer::append_bytes: not enough source bits");
    }
    if ((size_ & 7) == 0) {
        const std::size_t whole = count / 8;
        bytes_.insert(bytes_.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(whole));
        size_ += whole * 8;
        const std::size_t rest = count - whole * 8;
        if (rest > 0) {
            append(static_cast<std::uint64_t>(src[whole] >> (8 - rest)), static_cast<unsigned>(rest));
        }
        return;
    }
    for (std::size_t i = 0; i < count; ++i) {
        push_back((src[i >> 3] >> (7 - (i & 7))) & 1u);
    }
}

} // namespace pdqrng
