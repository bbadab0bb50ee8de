#include "pdqrng/pipeline/io.hpp"

#include "pdqrng/errors.hpp"
#include "pdqrng/extractor.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pdqrng::pipeline {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

// 17 significant digits so every double round-trips.
void put(std::string& line, double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    line.append(buf, static_cast<std::size_t>(n));
}

} // namespace

void write_trajectory_csv(const std::filesystem::path& path, const laser::Trajectory& traj, std::size_t stride) {
    if (stride == 0) {
        throw ConfigError("write_trajectory_csv: stride must be >= 1");
    }
    auto out = open_out(path);
    out << "time_s,photons,carriers,rsp_per_s,phase_var_rad2,power_w\n";
    std::string line;
    for (std::size_t i = 0; i < traj.size(); i += stride) {
        line.clear();
        put(line, traj.times[i]);
        for (double v : {traj.photons[i], traj.carriers[i], traj.spont_rate[i], traj.phase_variance[i],
                         traj.output_power[i]}) {
            line.push_back(',');
            put(line, v);
        }
        line.push_back('\n');
        out << line;
    }
    close_checked(out, path);
}

void write_pulses_csv(const std::filesystem::path& path, std::span<const mzi::PulseRecord> records,
                      std::span<const std::uint16_t> codes, std::size_t max_rows) {
    if (codes.size() != records.size()) {
        throw PreconditionError("write_pulses_csv: one code per record required");
    }
    auto out = open_out(path);
    out << "j,u1_w,u2_w,theta_rad,uout_w,bin\n";
    std::string line;
    const std::size_t rows = std::min(max_rows, records.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& r = records[i];
        line = std::to_string(r.index);
        for (double v : {r.arm1_power, r.arm2_power, r.phase, r.output_power}) {
            line.push_back(',');
            put(line, v);
        }
        line += ',' + std::to_string(codes[i]) + '\n';
        out << line;
    }
    close_checked(out, path);
}

laser::ObservedTrace read_observed_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    laser::ObservedTrace trace;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto comma = line.find(',');
        double t = 0;
        double p = 0;
        const char* end = line.data() + line.size();
        const auto r1 = std::from_chars(line.data(), line.data() + (comma == std::string::npos ? 0 : comma), t);
        const auto r2 = comma == std::string::npos ? std::from_chars_result{end, std::errc::invalid_argument}
                                                   : std::from_chars(line.data() + comma + 1, end, p);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            if (trace.times.empty() && !header_seen) {
                header_seen = true;
                continue;
            }
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected time_s,power_w");
        }
        trace.times.push_back(t);
        trace.power.push_back(p);
    }
    if (trace.times.size() < 2) {
        throw ValidationError(path.string() + ": trace needs at least two samples");
    }
    return trace;
}

void write_observed_trace(const std::filesystem::path& path, const laser::ObservedTrace& trace) {
    auto out = open_out(path);
    out << "time_s,power_w\n";
    std::string line;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        line.clear();
        put(line, trace.times[i]);
        line.push_back(',');
        put(line, trace.power[i]);
        line.push_back('\n');
        out << line;
    }
    close_checked(out, path);
}

std::vector<std::uint64_t> code_histogram(std::span<const std::uint16_t> codes, std::size_t levels) {
    std::vector<std::uint64_t> counts(levels, 0);
    for (std::uint16_t c : codes) {
        if (c >= levels) {
            throw ValidationError("code " + std::to_string(c) + " outside the ADC range");
        }
        ++counts[c];
    }
    return counts;
}

void write_histogram_csv(const std::filesystem::path& path, std::span<const std::uint64_t> counts,
                         const mzi::AdcConfig& adc, std::span<const double> model) {
    if (!model.empty() && model.size() != counts.size()) {
        throw PreconditionError("write_histogram_csv: model length mismatch");
    }
    auto out = open_out(path);
    out << "bin,lower_w,upper_w,count" << (model.empty() ? "" : ",model_probability") << '\n';
    const double bin = adc.bin_size();
    std::string line;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        line = std::to_string(i) + ',';
        put(line, static_cast<double>(i) * bin);
        line.push_back(',');
        put(line, static_cast<double>(i + 1) * bin);
        line += ',' + std::to_string(counts[i]);
        if (!model.empty()) {
            line.push_back(',');
            put(line, model[i]);
        }
        line.push_back('\n');
        out << line;
    }
    close_checked(out, path);
}

void write_autocorrelation_csv(const std::filesystem::path& path, std::span<const double> r) {
    auto out = open_out(path);
    out << "lag,r\n";
    std::string line;
    for (std::size_t k = 0; k < r.size(); ++k) {
        line = std::to_string(k + 1) + ',';
        put(line, r[k]);
        line.push_back('\n');
        out << line;
    }
    close_checked(out, path);
}

void write_bits(const std::filesystem::path& path, const BitBuffer& bits) {
    auto out = open_out(path, true);
    out.write(reinterpret_cast<const char*>(bits.bytes().data()), static_cast<std::streamsize>(bits.bytes().size()));
    close_checked(out, path);
}

BitBuffer read_bits(const std::filesystem::path& path, std::optional<std::size_t> bit_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t available = bytes.size() * 8;
    if (bit_count && *bit_count > available) {
        throw ValidationError(path.string() + ": holds " + std::to_string(available) + " bits, expected " +
                              std::to_string(*bit_count));
    }
    return BitBuffer(std::move(bytes), bit_count.value_or(available));
}

void write_bits_text(const std::filesystem::path& path, BitView bits) {
    auto out = open_out(path);
    std::string line;
    for (std::size_t i = 0; i < bits.size(); i += 64) {
        line.clear();
        const std::size_t end = std::min(bits.size(), i + 64);
        for (std::size_t j = i; j < end; ++j) {
            line.push_back(bits[j] ? '1' : '0');
        }
        line.push_back('\n');
        out << line;
    }
    close_checked(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    close_checked(out, path);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return extractor::sha256_hex(bytes);
}

} // namespace pdqrng::pipeline
