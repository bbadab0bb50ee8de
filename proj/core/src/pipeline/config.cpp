#include "pdqrng/pipeline/config.hpp"

#include "pdqrng/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pdqrng::pipeline {

namespace {

std::string format(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
concept Unsigned = std::is_unsigned_v<T> && !std::is_same_v<T, bool>;

std::string format_value(double v) { return format(v); }
std::string format_value(const std::optional<double>& v) { return v ? format(*v) : "auto"; }
std::string format_value(int v) { return std::to_string(v); }
template <Unsigned T>
std::string format_value(T v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }
std::string format_value(const std::filesystem::path& v) { return v.generic_string(); }
std::string format_value(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + format(v[i]);
    }
    return s;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& text, const char* expected) {
    throw ConfigError("config key '" + key + "': cannot read '" + text + "' as " + expected);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
        bad(key, text, "a finite number");
    }
    return v;
}

void parse_value(const std::string& key, const std::string& text, double& out) { out = to_double(key, text); }

void parse_value(const std::string& key, const std::string& text, std::optional<double>& out) {
    const std::string t = trim(text);
    if (t == "auto" || t.empty()) {
        out.reset();
    } else {
        out = to_double(key, t);
    }
}

void parse_value(const std::string& key, const std::string& text, int& out) {
    const std::string t = trim(text);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        bad(key, text, "an integer");
    }
}

template <Unsigned T>
void parse_value(const std::string& key, const std::string& text, T& out) {
    const std::string t = trim(text);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        // Accept exact scientific notation such as 1e6 for counts.
        const double d = to_double(key, t);
        if (d < 0 || d != std::floor(d) || d > 1.8e19) {
            bad(key, text, "a non-negative integer");
        }
        out = static_cast<T>(d);
    }
}

void parse_value(const std::string& key, const std::string& text, bool& out) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
        out = true;
    } else if (t == "false" || t == "0" || t == "no" || t == "off") {
        out = false;
    } else {
        bad(key, text, "a boolean");
    }
}

void parse_value(const std::string&, const std::string& text, std::string& out) { out = trim(text); }

void parse_value(const std::string&, const std::string& text, std::filesystem::path& out) { out = trim(text); }

void parse_value(const std::string& key, const std::string& text, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) {
            out.push_back(to_double(key, item));
        }
    }
}

// Every configuration key, in canonical order.
template <class F>
void visit_fields(PipelineConfig& c, F&& f) {
    auto& l = c.laser;
    auto& d = l.device;
    f("laser", "photon_saturation", l.photon_saturation);
    f("laser", "carriers_threshold", l.carriers_threshold);
    f("laser", "spont_coupling", l.spont_coupling);
    f("laser", "gain_per_carrier", l.gain_per_carrier);
    f("laser", "cavity_length", d.cavity_length);
    f("laser", "effective_index", d.effective_index);
    f("laser", "scatter_loss", d.scatter_loss);
    f("laser", "mirror_loss", d.mirror_loss);
    f("laser", "carrier_decay", d.carrier_decay);
    f("laser", "linewidth_enhancement", d.linewidth_enhancement);
    f("laser", "wavelength", d.wavelength);
    f("laser", "electron_charge", d.electron_charge);
    f("laser", "power_per_photon", d.power_per_photon);
    f("laser", "photon_floor", l.photon_floor);
    f("laser", "s_init", l.s_init);
    f("laser", "n_init", l.n_init);
    f("laser", "fit_mode", l.fit_mode);
    f("laser", "reference_trace", l.reference_trace);

    auto& dr = c.drive;
    f("drive", "dc_bias", dr.dc_bias);
    f("drive", "rf_amplitude", dr.rf_amplitude);
    f("drive", "reverse_bias_fraction", dr.reverse_bias_fraction);
    f("drive", "prf", dr.prf);
    f("drive", "periods", dr.periods);
    f("drive", "steps_per_period", dr.steps_per_period);
    f("drive", "shape_trace", dr.shape_trace);

    auto& m = c.interferometer.mzi;
    auto& a = c.interferometer.arms;
    f("interferometer", "coupler1_through", m.coupler1.through);
    f("interferometer", "coupler1_cross", m.coupler1.cross);
    f("interferometer", "coupler2_through", m.coupler2.through);
    f("interferometer", "coupler2_cross", m.coupler2.cross);
    f("interferometer", "arm1_delay", m.arm1_delay);
    f("interferometer", "arm2_delay", m.arm2_delay);
    f("interferometer", "static_phase", m.static_phase);
    f("interferometer", "visibility", m.visibility);
    f("interferometer", "detector_bandwidth", m.detector_bandwidth);
    f("interferometer", "arm1_mean", a.mean1);
    f("interferometer", "arm2_mean", a.mean2);
    f("interferometer", "arm1_sigma", a.sigma1);
    f("interferometer", "arm2_sigma", a.sigma2);

    f("adc", "resolution_bits", c.adc.resolution_bits);
    f("adc", "dynamic_range", c.adc.dynamic_range);
    f("adc", "noise_variance", c.adc.noise_variance);
    f("adc", "sample_offset", c.adc.sample_offset);

    f("run", "pulses", c.run.pulses);
    f("run", "seed", c.run.seed);
    f("run", "out_dir", c.run.out_dir);
    f("run", "phase_variance", c.run.phase_variance);
    f("run", "pulse_csv_rows", c.run.pulse_csv_rows);
    f("run", "trajectory_stride", c.run.trajectory_stride);
    f("run", "autocorrelation_lags", c.run.autocorrelation_lags);

    f("extraction", "hash", c.extraction.hash);
    f("extraction", "block_bits", c.extraction.block_bits);
    f("extraction", "reduction_factor", c.extraction.reduction_factor);
    f("extraction", "text_output", c.extraction.text_output);

    f("stats", "seq_len", c.stats.seq_len);
    f("stats", "sequences", c.stats.sequences);
    f("stats", "alpha", c.stats.alpha);
    f("stats", "symbol_bits", c.stats.symbol_bits);
    f("stats", "max_lag", c.stats.max_lag);

    auto& ce = c.certify;
    f("certify", "min_entropy_threshold", ce.min_entropy_threshold);
    f("certify", "explicit_statistics", ce.explicit_statistics);
    f("certify", "var_out", ce.var_out);
    f("certify", "var_u1", ce.var_u1);
    f("certify", "var_u2", ce.var_u2);
    f("certify", "var_noise", ce.var_noise);
    f("certify", "mean_sqrt_u1_sq", ce.mean_sqrt_u1_sq);
    f("certify", "mean_sqrt_u2_sq", ce.mean_sqrt_u2_sq);

    auto& fi = c.fit;
    auto& o = fi.options;
    f("fit", "candidate_lengths", fi.candidate_lengths);
    f("fit", "initial_photon_saturation", fi.initial_photon_saturation);
    f("fit", "threshold_current", fi.threshold_current);
    f("fit", "threshold_power", fi.threshold_power);
    f("fit", "s_sat_min", o.s_sat_min);
    f("fit", "s_sat_max", o.s_sat_max);
    f("fit", "s_sat_points", o.s_sat_points);
    f("fit", "envelope_tolerance", o.envelope_tolerance);
    f("fit", "gain_grid_points", o.gain_grid_points);
    f("fit", "gain_span", o.gain_span);
    f("fit", "refine_iterations", o.refine_iterations);
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

void require_file(const std::filesystem::path& p, const std::string& key) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
        throw ConfigError(key + ": file '" + p.string() + "' does not exist");
    }
}

std::vector<double> read_column(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        double x = 0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), x);
        if (res.ec != std::errc{}) {
            if (v.empty()) {
                continue; // header
            }
            throw ConfigError(path.string() + ": bad value '" + line + "'");
        }
        v.push_back(x);
    }
    return v;
}

} // namespace

laser::LaserParams LaserSection::params() const {
    return laser::make_laser_params(device, photon_saturation, carriers_threshold, spont_coupling, gain_per_carrier);
}

laser::DriveWaveform DriveSection::waveform() const {
    laser::DriveWaveform w;
    w.dc_bias = dc_bias;
    w.prf = prf;
    w.rf_amplitude = rf_amplitude ? *rf_amplitude : laser::rf_amplitude_for_reverse_bias(dc_bias, reverse_bias_fraction);
    if (!shape_trace.empty()) {
        w.shape = laser::WaveShape::sampled;
        w.trace = read_column(shape_trace);
    }
    w.duration = static_cast<double>(periods) / prf;
    w.dt = 1.0 / (prf * static_cast<double>(steps_per_period));
    return w;
}

void PipelineConfig::validate() const {
    require(laser.photon_floor > 0, "laser.photon_floor must be > 0");
    require(laser.s_init >= 0 && laser.n_init >= 0, "laser initial state must be non-negative");
    laser.params().validate();
    if (laser.fit_mode) {
        require(!laser.reference_trace.empty(), "laser.fit_mode requires laser.reference_trace");
    }
    if (!laser.reference_trace.empty()) {
        require_file(laser.reference_trace, "laser.reference_trace");
    }

    require(drive.periods >= 2, "drive.periods must be >= 2");
    require(drive.reverse_bias_fraction >= 0 && drive.reverse_bias_fraction < 0.5,
            "drive.reverse_bias_fraction must lie in [0, 0.5)");
    if (!drive.shape_trace.empty()) {
        require_file(drive.shape_trace, "drive.shape_trace");
    }
    drive.waveform().validate();

    interferometer.mzi.validate(drive.prf);
    const auto& a = interferometer.arms;
    require(a.mean1 > 0 && a.mean2 > 0, "interferometer arm means must be > 0");
    require(a.sigma1 >= 0 && a.sigma2 >= 0, "interferometer arm sigmas must be >= 0");

    adc.validate();

    if (run.pulses < 2) {
        throw ValidationError("run.pulses must be >= 2 (got " + std::to_string(run.pulses) + ")");
    }
    if (run.phase_variance) {
        require(*run.phase_variance >= 0, "run.phase_variance must be >= 0");
    }
    require(run.trajectory_stride >= 1, "run.trajectory_stride must be >= 1");
    require(run.autocorrelation_lags >= 1, "run.autocorrelation_lags must be >= 1");

    const auto hashes = extractor::supported_hashes();
    require(std::find(hashes.begin(), hashes.end(), extraction.hash) != hashes.end(),
            "extraction.hash '" + extraction.hash + "' is not supported");
    require(extraction.block_bits >= 512 && extraction.block_bits % 8 == 0,
            "extraction.block_bits must be a multiple of 8 and >= 512");
    if (extraction.reduction_factor) {
        require(*extraction.reduction_factor >= 1, "extraction.reduction_factor must be >= 1");
    }

    require(stats.seq_len > 0, "stats.seq_len must be > 0");
    require(stats.alpha > 0 && stats.alpha < 1, "stats.alpha must lie in (0, 1)");
    require(stats.symbol_bits >= 1 && stats.symbol_bits <= 16, "stats.symbol_bits must lie in [1, 16]");
    require(stats.max_lag >= 1, "stats.max_lag must be >= 1");

    require(certify.min_entropy_threshold >= 0, "certify.min_entropy_threshold must be >= 0");
    if (certify.explicit_statistics) {
        require(certify.mean_sqrt_u1_sq > 0 && certify.mean_sqrt_u2_sq > 0,
                "certify: explicit mean arm statistics must be > 0");
        require(certify.var_out >= 0 && certify.var_u1 >= 0 && certify.var_u2 >= 0 && certify.var_noise >= 0,
                "certify: explicit variances must be >= 0");
    }

    require(!fit.candidate_lengths.empty(), "fit.candidate_lengths must not be empty");
    for (double len : fit.candidate_lengths) {
        require(len > 0, "fit.candidate_lengths must be positive");
    }
    require(fit.initial_photon_saturation > 0, "fit.initial_photon_saturation must be > 0");
    require(fit.threshold_current > 0 && fit.threshold_power > 0, "fit threshold operating point must be positive");
    const auto& o = fit.options;
    require(o.s_sat_min > 0 && o.s_sat_max > o.s_sat_min && o.s_sat_points >= 1, "fit s_sat grid is invalid");
    require(o.envelope_tolerance >= 0 && o.gain_grid_points >= 2 && o.gain_span > 1 && o.refine_iterations >= 1,
            "fit search options are invalid");
}

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    PipelineConfig cfg;
    std::set<std::string> known;
    visit_fields(cfg, [&](const char* section, const char* key, auto&) {
        known.insert(std::string(section) + "." + key);
    });

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("config: key '" + section + "' outside a section");
        }
        for (const auto& [key, value] : body) {
            if (!known.contains(section + "." + key)) {
                throw ConfigError("config: unknown key [" + section + "] " + key);
            }
        }
    }

    visit_fields(cfg, [&](const char* section, const char* key, auto& field) {
        const std::string full = std::string(section) + "." + key;
        if (auto v = tree.get_optional<std::string>(boost::property_tree::ptree::path_type(full, '.'))) {
            parse_value(full, *v, field);
        }
    });

    auto resolve = [&](std::filesystem::path& p) {
        if (!p.empty() && p.is_relative() && !base_dir.empty()) {
            p = base_dir / p;
        }
    };
    resolve(cfg.laser.reference_trace);
    resolve(cfg.drive.shape_trace);
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    return parse_config(in, path.parent_path());
}

std::string to_ini(const PipelineConfig& cfg) {
    PipelineConfig copy = cfg;
    std::ostringstream out;
    std::string current;
    visit_fields(copy, [&](const char* section, const char* key, auto& field) {
        if (current != section) {
            out << (current.empty() ? "" : "\n") << '[' << section << "]\n";
            current = section;
        }
        out << key << " = " << format_value(field) << '\n';
    });
    return out.str();
}

} // namespace pdqrng::pipeline
