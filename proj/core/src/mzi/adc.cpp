#include "pdqrng/mzi/adc.hpp"

#include "pdqrng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace pdqrng::mzi {

void AdcConfig::validate() const {
    if (resolution_bits < 1 || resolution_bits > 16) {
        throw ConfigError("AdcConfig: resolution must be between 1 and 16 bits");
    }
    if (!(dynamic_range > 0) || !std::isfinite(dynamic_range)) {
        throw ConfigError("AdcConfig: dynamic range must be > 0");
    }
    if (!(noise_variance >= 0)) {
        throw ConfigError("AdcConfig: noise variance must be >= 0");
    }
    if (!(sample_offset >= 0)) {
        throw ConfigError("AdcConfig: sample offset must be >= 0");
    }
}

std::uint16_t digitize(double power, const AdcConfig& adc) noexcept {
    const double top = static_cast<double>(adc.levels() - 1);
    const double code = std::floor(power / adc.bin_size());
    if (!(code > 0.0)) {
        return 0;
    }
    return static_cast<std::uint16_t>(std::min(code, top));
}

std::vector<std::uint16_t> sample_and_digitize(std::span<const PulseRecord> records, const AdcConfig& adc) {
    adc.validate();
    std::vector<std::uint16_t> codes(records.size());
    std::transform(records.begin(), records.end(), codes.begin(),
                   [&](const PulseRecord& r) { return digitize(r.output_power, adc); });
    return codes;
}

std::vector<double> sample_waveform(std::span<const double> waveform, std::size_t samples_per_period, double dt,
                                    const AdcConfig& adc) {
    if (samples_per_period == 0 || waveform.size() % samples_per_period != 0 || !(dt > 0)) {
        throw ConfigError("sample_waveform: waveform must hold whole periods");
    }
    const auto offset = static_cast<std::size_t>(std::llround(adc.sample_offset / dt));
    const std::size_t periods = waveform.size() / samples_per_period;
    std::vector<double> out(periods);
    for (std::size_t p = 0; p < periods; ++p) {
        const auto first = waveform.begin() + static_cast<std::ptrdiff_t>(p * samples_per_period);
        const auto peak = std::max_element(first, first + static_cast<std::ptrdiff_t>(samples_per_period));
        const std::size_t idx = static_cast<std::size_t>(peak - waveform.begin()) + offset;
        out[p] = waveform[std::min(idx, waveform.size() - 1)];
    }
    return out;
}

double code_to_power(std::uint16_t code, const AdcConfig& adc) noexcept {
    return (static_cast<double>(code) + 0.5) * adc.bin_size();
}

void write_samples(const std::filesystem::path& path, std::span<const std::uint16_t> codes) {
    std::vector<unsigned char> buf(codes.size() * 2);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        buf[2 * i] = static_cast<unsigned char>(codes[i] & 0xFFu);
        buf[2 * i + 1] = static_cast<unsigned char>(codes[i] >> 8);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

std::vector<std::uint16_t> read_samples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() % 2 != 0) {
        throw ValidationError(path.string() + ": sample file length is not a multiple of 2 bytes");
    }
    std::vector<std::uint16_t> codes(buf.size() / 2);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        codes[i] = static_cast<std::uint16_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
    }
    return codes;
}

} // namespace pdqrng::mzi
