#include "pdqrng/entropy.hpp"
#include "pdqrng/errors.hpp"
#include "pdqrng/extractor.hpp"
#include "pdqrng/laser/phase_diffusion.hpp"
#include "pdqrng/mzi/adc.hpp"
#include "pdqrng/mzi/interferometer.hpp"
#include "pdqrng/random.hpp"
#include "pdqrng/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace pdqrng;
using namespace pdqrng::extractor;

namespace {

std::vector<std::uint16_t> random_samples(std::size_t n, int bits, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    std::vector<std::uint16_t> s(n);
    for (auto& v : s) {
        v = static_cast<std::uint16_t>(rng() >> (64 - bits));
    }
    return s;
}

std::vector<std::uint16_t> arcsine_samples(std::size_t n, std::uint64_t seed) {
    const auto arms = mzi::sample_arm_powers({}, n + 1, seed);
    const auto phases = laser::sample_pulse_phases(400.0, n + 1, seed);
    mzi::InterferometerConfig cfg;
    const auto rec = mzi::interfere_pulse_train(arms.arm1, arms.arm2, phases, cfg, 1.45e-10, seed);
    return mzi::sample_and_digitize(rec, mzi::AdcConfig{});
}

} // namespace

TEST_CASE("sample packing") {
    CHECK(pack_samples(std::vector<std::uint16_t>(8, 1), 1) == std::vector<std::uint8_t>{0xFF});
    CHECK(pack_samples(std::vector<std::uint16_t>{0x3FFF, 0x0000}, 14) ==
          std::vector<std::uint8_t>{0xFF, 0xFC, 0x00, 0x00});
    CHECK(pack_samples(std::vector<std::uint16_t>{}, 14).empty());
    CHECK(pack_samples(std::vector<std::uint16_t>{0x2001}, 14) == std::vector<std::uint8_t>{0x80, 0x04});
    CHECK_THROWS_AS(pack_samples(std::vector<std::uint16_t>{0x4000}, 14), ValidationError);

    for (int bits : {1, 7, 8, 13, 14, 16}) {
        const auto s = random_samples(1001, bits, static_cast<std::uint64_t>(bits));
        const auto packed = pack_samples(s, bits);
        CHECK(packed.size() == (1001 * static_cast<std::size_t>(bits) + 7) / 8);
        CHECK(unpack_samples(packed, s.size(), bits) == s);
    }
}

TEST_CASE("rate contract") {
    ExtractionConfig cfg;
    const auto samples = random_samples(1024, 14, 1);
    const auto out = extract(samples, cfg);
    CHECK(out.bits.size() == 7168);
    CHECK(out.blocks == 28);
    CHECK(out.dropped_bits == 0);
    CHECK(out.dropped_samples == 0);

    for (double rf : {1.0, 1.3, 1.9006, 2.0, 7.5, 14.0}) {
        for (std::size_t block_bits : {512, 1024, 4096}) {
            ExtractionConfig c;
            c.reduction_factor = rf;
            c.block_bits = block_bits;
            if (block_bits / rf > 512.0) {
                CHECK_THROWS_AS(c.validate(), ConfigError);
                continue;
            }
            const auto r = extract(random_samples(3001, 14, 2), c);
            const std::size_t blocks = 3001 * 14 / block_bits;
            CHECK(r.blocks == blocks);
            CHECK(r.bits.size() ==
                  static_cast<std::size_t>(std::floor(static_cast<double>(blocks * block_bits) / rf)));
            CHECK(r.dropped_bits == 3001 * 14 - blocks * block_bits);
            std::size_t sum = 0;
            for (std::size_t i = 0; i < blocks; ++i) {
                const std::size_t k = block_output_bits(i, block_bits, rf);
                CHECK(k <= static_cast<std::size_t>(std::ceil(block_bits / rf)));
                sum += k;
            }
            CHECK(sum == r.bits.size());
        }
    }
}

TEST_CASE("digest truncation keeps leading bits") {
    const auto samples = random_samples(512, 16, 3);
    ExtractionConfig full;
    full.input_bits_per_sample = 16;
    full.reduction_factor = 1.0;
    ExtractionConfig half = full;
    half.reduction_factor = 2.0;
    const auto a = extract(samples, full);
    const auto b = extract(samples, half);
    REQUIRE(a.blocks == b.blocks);
    for (std::size_t blk = 0; blk < a.blocks; ++blk) {
        for (std::size_t i = 0; i < 256; ++i) {
            REQUIRE(a.bits.view()[blk * 512 + i] == b.bits.view()[blk * 256 + i]);
        }
    }
}

TEST_CASE("extraction is deterministic and independent of the thread count") {
    const auto samples = random_samples(100000, 14, 4);
    ExtractionConfig cfg;
    cfg.reduction_factor = 1.9006;
    const auto one = extract(samples, cfg);
    CHECK(extract(samples, cfg).bits.bytes() == one.bits.bytes());
    cfg.threads = 4;
    const auto four = extract(samples, cfg);
    CHECK(four.bits.bytes() == one.bits.bytes());
    CHECK(four.bits.size() == one.bits.size());
}

TEST_CASE("configuration is validated") {
    ExtractionConfig cfg;
    cfg.reduction_factor = 0.9;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(extract(random_samples(1024, 14, 1), cfg), ConfigError);
    cfg = {};
    cfg.hash = "md5";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.hash = "not-a-hash";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.block_bits = 500;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    CHECK_THROWS_AS(extract(random_samples(30, 14, 1), cfg), ConfigError);
    for (const auto& h : supported_hashes()) {
        ExtractionConfig c;
        c.hash = h;
        CHECK_NOTHROW(c.validate());
        CHECK(extract(random_samples(64, 14, 5), c).bits.size() == 256);
    }
}

TEST_CASE("distinct hashes give distinct streams") {
    const auto samples = random_samples(256, 14, 6);
    ExtractionConfig w;
    ExtractionConfig s;
    s.hash = "sha512";
    CHECK(extract(samples, w).bits.bytes() != extract(samples, s).bits.bytes());
}

TEST_CASE("one flipped input bit changes about half of the block output") {
    ExtractionConfig cfg;
    cfg.reduction_factor = 1.0;
    cfg.input_bits_per_sample = 16;
    Xoshiro256pp rng(7);
    const std::size_t trials = 1000;
    std::size_t changed = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto samples = random_samples(32, 16, 100 + t);
        const auto base = extract(samples, cfg);
        const std::size_t bit = rng() % 512;
        samples[bit / 16] ^= static_cast<std::uint16_t>(1u << (15 - bit % 16));
        const auto flipped = extract(samples, cfg);
        for (std::size_t i = 0; i < 512; ++i) {
            changed += base.bits.view()[i] != flipped.bits.view()[i];
        }
    }
    const double n = 512.0 * trials;
    CHECK(std::abs(changed / n - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("extracted arcsine samples pass the frequency and runs tests") {
    const std::size_t bits_wanted = 10000000;
    const auto adc = mzi::AdcConfig{};
    const auto model = entropy::arcsine_bounds(0.97e-3, 0.90e-3, 0.9);
    ExtractionConfig cfg;
    cfg.reduction_factor = 14.0 / entropy::min_entropy_exact(entropy::anchored_arcsine_masses(model, adc));
    const auto samples = arcsine_samples(static_cast<std::size_t>(bits_wanted * cfg.reduction_factor / 14.0) + 1000, 9);
    const auto out = extract(samples, cfg);
    REQUIRE(out.bits.size() >= bits_wanted);
    const auto view = out.bits.view().subview(0, bits_wanted);
    CHECK(stats::monobit_test(view) >= 0.01);
    CHECK(stats::runs_test(view) >= 0.01);
}

TEST_CASE("sha256 of a known message") {
    const std::string abc = "abc";
    const std::vector<std::uint8_t> bytes(abc.begin(), abc.end());
    CHECK(sha256_hex(bytes) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
