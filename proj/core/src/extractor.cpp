#include "pdqrng/extractor.hpp"

#include "pdqrng/errors.hpp"

#include <openssl/evp.h>
#include <openssl/provider.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

namespace pdqrng::extractor {

namespace {

constexpr std::size_t kDigestBits = 512;

void load_providers() {
    static std::once_flag once;
    std::call_once(once, [] {
        // Whirlpool lives in the legacy provider; loading it disables the
        // implicit default provider, so load both.
        OSSL_PROVIDER_load(nullptr, "legacy");
        OSSL_PROVIDER_load(nullptr, "default");
    });
}

struct MdDeleter {
    void operator()(EVP_MD* md) const noexcept { EVP_MD_free(md); }
};
struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};
using MdPtr = std::unique_ptr<EVP_MD, MdDeleter>;
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

MdPtr fetch(const std::string& name) {
    load_providers();
    MdPtr md(EVP_MD_fetch(nullptr, name.c_str(), nullptr));
    if (!md) {
        throw ConfigError("hash '" + name + "' is not available");
    }
    return md;
}

} // namespace

void ExtractionConfig::validate() const {
    if (input_bits_per_sample < 1 || input_bits_per_sample > 16) {
        throw ConfigError("ExtractionConfig: input bits per sample must lie in [1, 16]");
    }
    if (!(reduction_factor >= 1.0) || !std::isfinite(reduction_factor)) {
        throw ConfigError("ExtractionConfig: reduction factor must be >= 1 (hashing cannot add entropy)");
    }
    if (block_bits == 0 || block_bits % 8 != 0 || block_bits < kDigestBits) {
        throw ConfigError("ExtractionConfig: block size must be a multiple of 8 and at least the digest size");
    }
    const auto md = fetch(hash);
    if (static_cast<std::size_t>(EVP_MD_get_size(md.get())) * 8 != kDigestBits) {
        throw ConfigError("ExtractionConfig: hash '" + hash + "' does not produce 512-bit digests");
    }
    if (static_cast<double>(block_bits) / reduction_factor > static_cast<double>(kDigestBits)) {
        throw ConfigError("ExtractionConfig: block size over RF exceeds the digest length");
    }
}

std::vector<std::string> supported_hashes() {
    return {"whirlpool", "sha512", "sha3-512", "blake2b512"};
}

std::vector<std::uint8_t> pack_samples(std::span<const std::uint16_t> samples, int bits) {
    if (bits < 1 || bits > 16) {
        throw ConfigError("pack_samples: bits must lie in [1, 16]");
    }
    const std::uint32_t limit = 1u << bits;
    BitBuffer buf;
    buf.reserve_bits(samples.size() * static_cast<std::size_t>(bits));
    for (std::uint16_t s : samples) {
        if (s >= limit) {
            throw ValidationError("pack_samples: sample " + std::to_string(s) + " does not fit in " +
                                  std::to_string(bits) + " bits");
        }
        buf.append(s, static_cast<unsigned>(bits));
    }
    return buf.bytes();
}

std::vector<std::uint16_t> unpack_samples(std::span<const std::uint8_t> bytes, std::size_t count, int bits) {
    if (bits < 1 || bits > 16) {
        throw ConfigError("unpack_samples: bits must lie in [1, 16]");
    }
    const std::size_t need = count * static_cast<std::size_t>(bits);
    if (bytes.size() * 8 < need) {
        throw ValidationError("unpack_samples: byte stream too short");
    }
    const BitView view(bytes, need);
    std::vector<std::uint16_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = static_cast<std::uint16_t>(view.word(i * static_cast<std::size_t>(bits), static_cast<unsigned>(bits)));
    }
    return out;
}

std::size_t block_output_bits(std::size_t index, std::size_t block_bits, double reduction_factor) noexcept {
    auto total = [&](std::size_t n) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(n * block_bits) / reduction_factor));
    };
    return total(index + 1) - total(index);
}

ExtractionResult extract(std::span<const std::uint16_t> samples, const ExtractionConfig& cfg) {
    cfg.validate();
    const auto bits = static_cast<std::size_t>(cfg.input_bits_per_sample);
    const std::vector<std::uint8_t> packed = pack_samples(samples, cfg.input_bits_per_sample);

    ExtractionResult res;
    res.input_bits = samples.size() * bits;
    res.blocks = res.input_bits / cfg.block_bits;
    if (res.blocks == 0) {
        throw ConfigError("extract: need at least " + std::to_string(cfg.block_bits) + " input bits, got " +
                          std::to_string(res.input_bits));
    }
    res.dropped_bits = res.input_bits - res.blocks * cfg.block_bits;
    res.dropped_samples = samples.size() - res.blocks * cfg.block_bits / bits;

    const std::size_t block_bytes = cfg.block_bits / 8;
    std::vector<std::uint8_t> digests(res.blocks * (kDigestBits / 8));
    const MdPtr md = fetch(cfg.hash);

    std::atomic<std::size_t> next{0};
    constexpr std::size_t kBatch = 256;
    auto work = [&] {
        CtxPtr ctx(EVP_MD_CTX_new());
        if (!ctx) {
            throw Error("extract: cannot allocate hash context");
        }
        for (;;) {
            const std::size_t first = next.fetch_add(kBatch);
            if (first >= res.blocks) {
                return;
            }
            const std::size_t last = std::min(first + kBatch, res.blocks);
            for (std::size_t b = first; b < last; ++b) {
                unsigned int len = 0;
                if (EVP_DigestInit_ex(ctx.get(), md.get(), nullptr) != 1 ||
                    EVP_DigestUpdate(ctx.get(), packed.data() + b * block_bytes, block_bytes) != 1 ||
                    EVP_DigestFinal_ex(ctx.get(), digests.data() + b * (kDigestBits / 8), &len) != 1) {
                    throw Error("extract: hashing failed");
                }
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(res.blocks / kBatch + 1)));
    if (threads == 1) {
        work();
    } else {
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back([&] {
                    try {
                        work();
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        failure = std::current_exception();
                        next = res.blocks;
                    }
                });
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    res.bits.reserve_bits(static_cast<std::size_t>(static_cast<double>(res.blocks * cfg.block_bits) / cfg.reduction_factor) + 8);
    for (std::size_t b = 0; b < res.blocks; ++b) {
        const std::size_t keep = block_output_bits(b, cfg.block_bits, cfg.reduction_factor);
        res.bits.append_bytes(std::span(digests).subspan(b * (kDigestBits / 8), kDigestBits / 8), keep);
    }
    return res;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    s.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        s.push_back(hex[out[i] >> 4]);
        s.push_back(hex[out[i] & 15]);
    }
    return s;
}

} // namespace pdqrng::extractor
