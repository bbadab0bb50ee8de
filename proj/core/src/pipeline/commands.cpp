#include "pdqrng/pipeline/commands.hpp"

#include "manifest.hpp"
#include "pdqrng/extractor.hpp"
#include "pdqrng/laser/phase_diffusion.hpp"
#include "pdqrng/laser/rate_equations.hpp"
#include "pdqrng/mzi/adc.hpp"
#include "pdqrng/pipeline/io.hpp"
#include "pdqrng/random.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#ifndef PDQRNG_VERSION
#define PDQRNG_VERSION "unknown"
#endif

namespace pdqrng::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

StageError::StageError(std::string stage, const std::string& cause, int exit_code)
    : Error(stage + ": " + cause), stage_(std::move(stage)), exit_code_(exit_code) {}

int exit_code_for(const std::exception& e) noexcept {
    if (const auto* s = dynamic_cast<const StageError*>(&e)) {
        return s->exit_code();
    }
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const PreconditionError*>(&e)) {
        return exit_validation;
    }
    return exit_stage_failure;
}

namespace {

constexpr const char* kRngScheme =
    "xoshiro256++; stream for (seed, stage, chunk) seeded by splitmix64 over seed, stage id and chunk index; "
    "stages pulse_phases=1 arm_powers=2 detector_noise=3; chunk = 65536 pulses";

template <class F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what(), exit_code_for(e));
    }
}

void log(const RunOptions& opt, const std::string& stage, const std::string& msg) {
    if (opt.log) {
        *opt.log << '[' << stage << "] " << msg << '\n';
    }
}

json params_json(const laser::LaserParams& p) {
    return {
        {"gain_per_carrier", p.gain_per_carrier},
        {"carriers_transparency", p.carriers_transparency},
        {"carriers_threshold", p.carriers_threshold},
        {"photon_saturation", p.photon_saturation},
        {"carrier_decay", p.carrier_decay},
        {"cavity_decay", p.cavity_decay},
        {"linewidth_enhancement", p.linewidth_enhancement},
        {"spont_coupling", p.spont_coupling},
        {"cavity_length", p.cavity_length},
        {"mirror_loss", p.mirror_loss},
        {"scatter_loss", p.scatter_loss},
        {"power_per_photon", p.power_per_photon},
    };
}

double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

double variance(std::span<const double> x) {
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m) * (v - m);
    }
    return acc / static_cast<double>(x.size() - 1);
}

laser::FitSetup fit_setup(const PipelineConfig& cfg) {
    laser::FitSetup s;
    s.device = cfg.laser.device;
    s.drive = cfg.drive.waveform();
    s.threshold_current = cfg.fit.threshold_current;
    s.threshold_power = cfg.fit.threshold_power;
    s.detector_bandwidth = cfg.interferometer.mzi.detector_bandwidth;
    s.s_init = cfg.laser.s_init;
    s.n_init = cfg.laser.n_init;
    return s;
}

struct FitOutput {
    laser::FitResult result;
    std::vector<fs::path> files;
};

FitOutput run_fit(const PipelineConfig& cfg, const fs::path& out_dir, const RunOptions& opt) {
    const auto observed = read_observed_trace(cfg.laser.reference_trace);
    const auto setup = fit_setup(cfg);
    auto options = cfg.fit.options;
    options.threads = opt.threads;
    log(opt, "fit", "fitting " + std::to_string(cfg.fit.candidate_lengths.size()) + " cavity length(s) to " +
                        cfg.laser.reference_trace.string());
    FitOutput out{laser::fit_parameters(observed, cfg.fit.candidate_lengths, cfg.fit.initial_photon_saturation, setup,
                                        options),
                  {}};

    const auto simulated = laser::simulated_detection(out.result.params, setup, observed.times);
    json candidates = json::array();
    for (const auto& c : out.result.candidates) {
        candidates.push_back({{"cavity_length", c.cavity_length},
                              {"photon_saturation", c.photon_saturation},
                              {"feasible", c.feasible},
                              {"gain_per_carrier", c.gain_per_carrier},
                              {"rms_deviation_w", c.rms_deviation},
                              {"max_violation", c.max_violation},
                              {"note", c.note}});
    }
    json report = {{"params", params_json(out.result.params)},
                   {"rms_deviation_w", out.result.rms_deviation},
                   {"envelope_tolerance", options.envelope_tolerance},
                   {"candidates", candidates},
                   {"provenance", out.result.provenance}};
    const auto report_path = out_dir / "fit_report.json";
    write_json(report_path, report);

    const auto trace_path = out_dir / "fit_trace.csv";
    {
        std::string text = "time_s,observed_w,simulated_w\n";
        char buf[96];
        for (std::size_t i = 0; i < observed.times.size(); ++i) {
            const int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", observed.times[i], observed.power[i],
                                        simulated[i]);
            text.append(buf, static_cast<std::size_t>(n));
        }
        write_text(trace_path, text);
    }
    out.files = {report_path, trace_path};
    log(opt, "fit", "G_N = " + std::to_string(out.result.params.gain_per_carrier) +
                        ", rms = " + std::to_string(out.result.rms_deviation) + " W");
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create " + dir.string() + ": " + ec.message());
    }
}

} // namespace

std::string config_sha256(const PipelineConfig& cfg) {
    const std::string text = to_ini(cfg);
    return extractor::sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ArmStatistics arm_statistics(std::span<const double> u1, std::span<const double> u2) {
    if (u1.size() < 2 || u1.size() != u2.size()) {
        throw PreconditionError("arm_statistics: need two equally long series of at least two samples");
    }
    auto sqrt_mean_sq = [](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) {
            acc += std::sqrt(std::max(v, 0.0));
        }
        const double m = acc / static_cast<double>(x.size());
        return m * m;
    };
    return {mean(u1), mean(u2), variance(u1), variance(u2), sqrt_mean_sq(u1), sqrt_mean_sq(u2)};
}

SimulateResult cmd_simulate(const PipelineConfig& cfg, const RunOptions& opt) {
    run_stage("config", [&] { cfg.validate(); });
    const fs::path dir = cfg.run.out_dir;
    ensure_dir(dir);

    SimulateResult res;
    std::vector<fs::path> fit_files;
    if (cfg.laser.fit_mode) {
        auto fit = run_stage("fit", [&] { return run_fit(cfg, dir, opt); });
        res.params = fit.result.params;
        fit_files = fit.files;
    } else {
        res.params = cfg.laser.params();
    }

    const auto drive = cfg.drive.waveform();
    const auto traj = run_stage("laser", [&] {
        log(opt, "laser", "integrating " + std::to_string(drive.steps()) + " steps");
        return laser::integrate_rate_equations(res.params, drive, cfg.laser.s_init, cfg.laser.n_init,
                                               {cfg.laser.photon_floor});
    });

    run_stage("phase", [&] {
        const double t_end = traj.times.back();
        res.phase_variance = laser::accumulate_phase_variance(traj, res.params, t_end - drive.period(), t_end,
                                                              cfg.laser.photon_floor);
        const auto filtered =
            laser::low_pass_filter(traj.output_power, traj.dt, cfg.interferometer.mzi.detector_bandwidth);
        const std::size_t spp = cfg.drive.steps_per_period;
        res.pulse = laser::measure_pulse(std::span(filtered).subspan(filtered.size() - spp), traj.dt);
    });
    res.phase_variance_used = cfg.run.phase_variance.value_or(res.phase_variance);
    log(opt, "phase", "variance per interval " + std::to_string(res.phase_variance) + " rad^2");

    const std::size_t n = cfg.run.pulses;
    const std::uint64_t seed = cfg.run.seed;
    std::vector<mzi::PulseRecord> records;
    std::vector<std::uint16_t> codes;
    run_stage("interferometer", [&] {
        const auto phases = laser::sample_pulse_phases(res.phase_variance_used, n, seed);
        const auto arms = mzi::sample_arm_powers(cfg.interferometer.arms, n, seed);
        res.arms = arm_statistics(arms.arm1, arms.arm2);
        records = mzi::interfere_pulse_train(arms.arm1, arms.arm2, phases, cfg.interferometer.mzi,
                                             cfg.adc.noise_variance, seed);
        codes = mzi::sample_and_digitize(records, cfg.adc);
    });
    res.pulses = n;
    res.records = records.size();
    log(opt, "interferometer", std::to_string(records.size()) + " samples");

    run_stage("write", [&] {
        const auto cfg_path = dir / "config.ini";
        write_text(cfg_path, to_ini(cfg));
        const auto traj_path = dir / "trajectory.csv";
        write_trajectory_csv(traj_path, traj, cfg.run.trajectory_stride);
        const auto pulses_path = dir / "pulses.csv";
        write_pulses_csv(pulses_path, records, codes, cfg.run.pulse_csv_rows);
        res.samples = dir / "samples.bin";
        mzi::write_samples(res.samples, codes);

        const auto counts = code_histogram(codes, cfg.adc.levels());
        const auto hist_path = dir / "histograms.csv";
        write_histogram_csv(hist_path, counts, cfg.adc);

        std::vector<double> power(codes.size());
        std::transform(codes.begin(), codes.end(), power.begin(),
                       [&](std::uint16_t c) { return mzi::code_to_power(c, cfg.adc); });
        const auto acf_path = dir / "raw_autocorrelation.csv";
        const std::size_t lags = std::min(cfg.run.autocorrelation_lags, power.size() - 1);
        std::vector<double> acf;
        try {
            acf = stats::autocorrelation(power, lags);
        } catch (const DegenerateInputError&) {
            log(opt, "write", "constant samples; autocorrelation left empty");
        }
        write_autocorrelation_csv(acf_path, acf);

        res.files = fit_files;
        for (const auto& p : {cfg_path, traj_path, pulses_path, res.samples, hist_path, acf_path}) {
            res.files.push_back(p);
        }

        Manifest manifest = Manifest::create(dir);
        manifest.section("run") = {{"tool", "pdqrng"},
                                   {"version", PDQRNG_VERSION},
                                   {"config_sha256", config_sha256(cfg)},
                                   {"seed", seed},
                                   {"pulses", n},
                                   {"samples", records.size()},
                                   {"rng_scheme", kRngScheme}};
        manifest.section("laser") = {{"params", params_json(res.params)},
                                     {"fit_mode", cfg.laser.fit_mode},
                                     {"photon_floor", cfg.laser.photon_floor},
                                     {"power_per_photon_w", res.params.power_per_photon},
                                     {"phase_variance_per_interval_rad2", res.phase_variance},
                                     {"phase_variance_used_rad2", res.phase_variance_used},
                                     {"phase_variance_source", cfg.run.phase_variance ? "config" : "trajectory"},
                                     {"filtered_peak_w", res.pulse.peak},
                                     {"filtered_fwhm_s", res.pulse.fwhm}};
        manifest.section("arm_statistics") = {{"mean_u1_w", res.arms.mean_u1},
                                              {"mean_u2_w", res.arms.mean_u2},
                                              {"var_u1_w2", res.arms.var_u1},
                                              {"var_u2_w2", res.arms.var_u2},
                                              {"mean_sqrt_u1_sq_w", res.arms.mean_sqrt_u1_sq},
                                              {"mean_sqrt_u2_sq_w", res.arms.mean_sqrt_u2_sq}};
        manifest.section("adc") = {{"resolution_bits", cfg.adc.resolution_bits},
                                   {"dynamic_range_w", cfg.adc.dynamic_range},
                                   {"noise_variance_w2", cfg.adc.noise_variance}};
        for (const auto& p : res.files) {
            manifest.add_file(p);
        }
        manifest.save();
    });
    return res;
}

CertifyResult cmd_certify(const fs::path& samples, const PipelineConfig& cfg, const fs::path& report_path,
                          const RunOptions& opt) {
    run_stage("config", [&] { cfg.validate(); });
    CertifyResult res;
    res.report_path = report_path;

    mzi::VisibilityInputs in;
    std::map<std::string, std::string> provenance;
    std::size_t sample_count = 0;
    run_stage("certify", [&] {
        if (cfg.certify.explicit_statistics) {
            const auto& c = cfg.certify;
            in = {c.var_out, c.var_u1, c.var_u2, c.var_noise, c.mean_sqrt_u1_sq, c.mean_sqrt_u2_sq};
            for (const char* key : {"var_out", "var_u1", "var_u2", "var_noise", "mean_sqrt_u1_sq", "mean_sqrt_u2_sq"}) {
                provenance[key] = std::string("config [certify] ") + key;
            }
            return;
        }
        const auto codes = mzi::read_samples(samples);
        sample_count = codes.size();
        if (codes.size() < 2) {
            throw ValidationError(samples.string() + ": need at least two samples");
        }
        const Manifest manifest = Manifest::load(samples.parent_path());
        if (!manifest.has("arm_statistics")) {
            throw ValidationError("no arm statistics in " + (samples.parent_path() / "manifest.json").string() +
                                  "; run simulate first or set certify.explicit_statistics");
        }
        const auto& arms = manifest.doc().at("arm_statistics");
        std::vector<double> power(codes.size());
        for (std::uint16_t c : codes) {
            if (c >= cfg.adc.levels()) {
                throw ValidationError(samples.string() + ": code " + std::to_string(c) + " exceeds the ADC range");
            }
        }
        std::transform(codes.begin(), codes.end(), power.begin(),
                       [&](std::uint16_t c) { return mzi::code_to_power(c, cfg.adc); });
        in.var_out = variance(power);
        in.var_u1 = arms.at("var_u1_w2").get<double>();
        in.var_u2 = arms.at("var_u2_w2").get<double>();
        in.var_noise = cfg.adc.noise_variance;
        in.mean_sqrt_u1_sq = arms.at("mean_sqrt_u1_sq_w").get<double>();
        in.mean_sqrt_u2_sq = arms.at("mean_sqrt_u2_sq_w").get<double>();
        const std::string from_samples =
            samples.filename().string() + " (" + std::to_string(codes.size()) + " codes at bin midpoints)";
        provenance["var_out"] = from_samples;
        for (const char* key : {"var_u1", "var_u2", "mean_sqrt_u1_sq", "mean_sqrt_u2_sq"}) {
            provenance[key] = "manifest.json arm_statistics";
        }
        provenance["var_noise"] = "config [adc] noise_variance";
    });
    provenance["prf"] = "config [drive] prf";
    provenance["adc"] = "config [adc] resolution_bits, dynamic_range";
    provenance["arcsine_bounds"] = "u1 + u2 -/+ 2|g| sqrt(u1 u2) with u = E[sqrt u]^2";

    res.visibility = run_stage("certify", [&] { return mzi::estimate_visibility(in); });
    std::vector<std::string> warnings;
    if (res.visibility.degenerate) {
        warnings.emplace_back("degenerate statistics: negative interference variance, visibility set to 0");
    }
    if (res.visibility.clamped) {
        warnings.emplace_back("visibility estimate " + std::to_string(res.visibility.raw) + " clamped to 1");
    }

    const auto model = entropy::arcsine_bounds(in.mean_sqrt_u1_sq, in.mean_sqrt_u2_sq, res.visibility.value);
    try {
        res.report = entropy::certify(model, cfg.adc, cfg.drive.prf, res.visibility.value);
    } catch (const PreconditionError& e) {
        // Zero or sub-bin span: nothing to certify.
        res.report = {};
        res.report.visibility = res.visibility.value;
        res.report.u_min = model.u_min;
        res.report.u_max = model.u_max;
        res.report.span = model.span();
        res.report.resolution_bits = cfg.adc.resolution_bits;
        res.report.dynamic_range = cfg.adc.dynamic_range;
        res.report.prf = cfg.drive.prf;
        warnings.emplace_back(std::string("zero arcsine span: ") + e.what());
    }
    res.report.provenance = provenance;
    res.report.warnings.insert(res.report.warnings.begin(), warnings.begin(), warnings.end());
    res.passed = res.report.h_exact >= cfg.certify.min_entropy_threshold && res.report.h_exact > 0;

    run_stage("write", [&] {
        const auto& r = res.report;
        std::string warn;
        for (const auto& w : r.warnings) {
            warn += (warn.empty() ? "" : "; ") + w;
        }
        json doc = {{"visibility", r.visibility},
                    {"visibility_raw", res.visibility.raw},
                    {"visibility_clamped", res.visibility.clamped},
                    {"visibility_degenerate", res.visibility.degenerate},
                    {"var_out_w2", in.var_out},
                    {"var_u1_w2", in.var_u1},
                    {"var_u2_w2", in.var_u2},
                    {"var_noise_w2", in.var_noise},
                    {"mean_sqrt_u1_sq_w", in.mean_sqrt_u1_sq},
                    {"mean_sqrt_u2_sq_w", in.mean_sqrt_u2_sq},
                    {"u_min_w", r.u_min},
                    {"u_max_w", r.u_max},
                    {"span_w", r.span},
                    {"resolution_bits", r.resolution_bits},
                    {"dynamic_range_w", r.dynamic_range},
                    {"h_exact_bits", r.h_exact},
                    {"h_closed_form_bits", r.h_closed_form},
                    {"h_true_grid_bits", r.h_true_grid},
                    {"first_bin_prob", r.first_bin_prob},
                    {"reduction_factor", r.reduction_factor},
                    {"prf_hz", r.prf},
                    {"bit_rate_bps", r.bit_rate},
                    {"samples", sample_count},
                    {"threshold_bits", cfg.certify.min_entropy_threshold},
                    {"passed", res.passed},
                    {"warnings", warn}};
        for (const auto& [k, v] : r.provenance) {
            doc["provenance_" + k] = v;
        }
        if (report_path.has_parent_path()) {
            ensure_dir(report_path.parent_path());
        }
        write_json(report_path, doc);

        const fs::path dir = report_path.has_parent_path() ? report_path.parent_path() : fs::path(".");
        Manifest manifest = Manifest::load(dir);
        manifest.section("certification") = {{"h_exact_bits", r.h_exact},
                                             {"reduction_factor", r.reduction_factor},
                                             {"visibility", r.visibility},
                                             {"passed", res.passed}};
        manifest.add_file(report_path);
        manifest.save();
    });
    log(opt, "certify", "|g| = " + std::to_string(res.report.visibility) + ", H = " +
                            std::to_string(res.report.h_exact) + " bits" + (res.passed ? "" : " (below threshold)"));
    return res;
}

ExtractResult cmd_extract(const fs::path& samples, const fs::path& report, const fs::path& output,
                          const PipelineConfig& cfg, const RunOptions& opt) {
    run_stage("config", [&] { cfg.validate(); });
    extractor::ExtractionConfig ec;
    run_stage("extract", [&] {
        const json doc = read_json(report);
        const double h = doc.at("h_exact_bits").get<double>();
        ec.input_bits_per_sample = doc.at("resolution_bits").get<int>();
        if (cfg.extraction.reduction_factor) {
            ec.reduction_factor = *cfg.extraction.reduction_factor;
        } else {
            if (!(h > 0)) {
                throw ConfigError("the entropy report certifies no min-entropy; refusing to extract");
            }
            ec.reduction_factor = doc.at("reduction_factor").get<double>();
        }
        if (ec.reduction_factor < 1.0) {
            throw ConfigError("reduction factor " + std::to_string(ec.reduction_factor) +
                              " < 1 would expand entropy; refusing to extract");
        }
    });
    ec.hash = cfg.extraction.hash;
    ec.block_bits = cfg.extraction.block_bits;
    ec.threads = opt.threads;

    const auto codes = run_stage("extract", [&] { return mzi::read_samples(samples); });
    const auto out = run_stage("extract", [&] { return extractor::extract(codes, ec); });

    ExtractResult res;
    res.output = output;
    res.output_bits = out.bits.size();
    res.blocks = out.blocks;
    res.dropped_bits = out.dropped_bits;
    res.dropped_samples = out.dropped_samples;
    res.reduction_factor = ec.reduction_factor;

    run_stage("write", [&] {
        if (output.has_parent_path()) {
            ensure_dir(output.parent_path());
        }
        write_bits(output, out.bits);
        const fs::path dir = output.has_parent_path() ? output.parent_path() : fs::path(".");
        Manifest manifest = Manifest::load(dir);
        manifest.add_file(output);
        json section = {{"output_file", output.filename().string()},
                        {"output_bits", res.output_bits},
                        {"blocks", res.blocks},
                        {"block_bits", ec.block_bits},
                        {"hash", ec.hash},
                        {"reduction_factor", ec.reduction_factor},
                        {"input_samples", codes.size()},
                        {"dropped_tail_bits", res.dropped_bits},
                        {"dropped_tail_samples", res.dropped_samples}};
        if (cfg.extraction.text_output) {
            auto text = output;
            text.replace_extension(".txt");
            write_bits_text(text, out.bits.view());
            manifest.add_file(text);
            section["text_file"] = text.filename().string();
        }
        manifest.section("extraction") = section;
        manifest.save();
    });
    log(opt, "extract", std::to_string(res.output_bits) + " bits from " + std::to_string(res.blocks) +
                            " blocks; dropped " + std::to_string(res.dropped_samples) + " tail samples");
    return res;
}

TestResult cmd_test(const fs::path& bits_path, const PipelineConfig& cfg, const fs::path& out_dir,
                    std::optional<std::size_t> bit_count, const RunOptions& opt) {
    run_stage("config", [&] { cfg.validate(); });
    if (!bit_count) {
        const Manifest m = Manifest::load(bits_path.has_parent_path() ? bits_path.parent_path() : fs::path("."));
        if (m.has("extraction")) {
            const auto& e = m.doc().at("extraction");
            if (e.value("output_file", std::string{}) == bits_path.filename().string()) {
                bit_count = e.at("output_bits").get<std::size_t>();
            }
        }
    }
    const BitBuffer buffer = run_stage("test", [&] { return read_bits(bits_path, bit_count); });
    const BitView all = buffer.view();

    TestResult res;
    res.bits = all.size();
    std::size_t m = all.size() / cfg.stats.seq_len;
    if (cfg.stats.sequences > 0) {
        if (m < cfg.stats.sequences) {
            res.warnings.push_back("only " + std::to_string(m) + " of " + std::to_string(cfg.stats.sequences) +
                                   " requested sequences available");
        }
        m = std::min(m, cfg.stats.sequences);
    }
    const auto battery = run_stage("test", [&] {
        return stats::run_battery(all.subview(0, std::min(all.size(), m * cfg.stats.seq_len)), cfg.stats.seq_len,
                                  cfg.stats.alpha, opt.threads);
    });
    res.battery = battery.summary;
    if (res.battery.m < 10) {
        res.warnings.emplace_back("fewer than 10 sequences; P_value_T not computed");
    }

    const auto symbols = stats::symbols_from_bits(all, cfg.stats.symbol_bits);
    res.symbols = symbols.size();
    std::optional<stats::UniformityDeviation> uni;
    if (symbols.size() >= (std::size_t{1} << cfg.stats.symbol_bits)) {
        uni = stats::uniformity_deviation(symbols, cfg.stats.symbol_bits);
        for (double d : uni->deviation) {
            res.max_deviation_sigmas = std::max(res.max_deviation_sigmas, std::abs(d) / uni->sigma);
        }
    } else {
        res.warnings.emplace_back("too few symbols for the uniformity analysis");
    }
    std::vector<double> acf;
    if (symbols.size() > cfg.stats.max_lag) {
        std::vector<double> x(symbols.begin(), symbols.end());
        try {
            acf = stats::autocorrelation(x, cfg.stats.max_lag);
        } catch (const DegenerateInputError&) {
            res.warnings.emplace_back("constant symbol stream; autocorrelation undefined");
        }
    }
    if (!acf.empty()) {
        double sq = 0.0;
        for (double r : acf) {
            sq += r * r;
            res.autocorrelation_max = std::max(res.autocorrelation_max, std::abs(r));
        }
        res.autocorrelation_rms = std::sqrt(sq / static_cast<double>(acf.size()));
        res.autocorrelation_bound = 3.0 / std::sqrt(static_cast<double>(symbols.size()));
    }

    res.all_pass = std::all_of(res.battery.tests.begin(), res.battery.tests.end(),
                               [](const stats::TestSummary& t) { return t.proportion_ok && t.uniformity_ok; });

    run_stage("write", [&] {
        ensure_dir(out_dir);
        const auto& s = res.battery;
        json tests = json::object();
        std::string battery_csv = "test,proportion,lower,upper,p_value_t,proportion_ok,uniformity_ok\n";
        std::string pvalues_csv = "test,sequence,p_value,pass\n";
        char buf[160];
        for (const auto& t : s.tests) {
            tests[t.test_name] = {{"p_values", t.p_values},
                                  {"passed", t.passed},
                                  {"proportion", t.proportion},
                                  {"p_value_t", t.p_value_t},
                                  {"proportion_ok", t.proportion_ok},
                                  {"uniformity_ok", t.uniformity_ok}};
            int n = std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%d,%d\n", t.test_name.c_str(),
                                  t.proportion, s.interval.lower, s.interval.upper, t.p_value_t,
                                  t.proportion_ok ? 1 : 0, t.uniformity_ok ? 1 : 0);
            battery_csv.append(buf, static_cast<std::size_t>(n));
            for (std::size_t i = 0; i < t.p_values.size(); ++i) {
                n = std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%d\n", t.test_name.c_str(), i, t.p_values[i],
                                  t.p_values[i] >= s.alpha ? 1 : 0);
                pvalues_csv.append(buf, static_cast<std::size_t>(n));
            }
        }
        json doc = {{"bits", res.bits},
                    {"m", s.m},
                    {"seq_len", s.seq_len},
                    {"s_count", s.s_count},
                    {"alpha", s.alpha},
                    {"interval", {{"center", s.interval.center}, {"lower", s.interval.lower}, {"upper", s.interval.upper}}},
                    {"tests", tests},
                    {"uniformity",
                     {{"symbol_bits", cfg.stats.symbol_bits},
                      {"symbols", res.symbols},
                      {"sigma", uni ? uni->sigma : 0.0},
                      {"max_deviation_sigmas", res.max_deviation_sigmas}}},
                    {"autocorrelation",
                     {{"max_lag", acf.size()},
                      {"rms", res.autocorrelation_rms},
                      {"max_abs", res.autocorrelation_max},
                      {"bound", res.autocorrelation_bound}}},
                    {"all_pass", res.all_pass},
                    {"warnings", res.warnings}};

        const auto report_path = out_dir / "battery_report.json";
        const auto battery_path = out_dir / "battery.csv";
        const auto pvalues_path = out_dir / "pvalues.csv";
        const auto uniformity_path = out_dir / "uniformity.csv";
        const auto acf_path = out_dir / "autocorrelation.csv";
        write_json(report_path, doc);
        write_text(battery_path, battery_csv);
        write_text(pvalues_path, pvalues_csv);
        std::string uni_csv = "symbol,count,deviation,sigma\n";
        if (uni) {
            for (std::size_t i = 0; i < uni->counts.size(); ++i) {
                const int n = std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g\n", i,
                                            static_cast<unsigned long long>(uni->counts[i]), uni->deviation[i],
                                            uni->sigma);
                uni_csv.append(buf, static_cast<std::size_t>(n));
            }
        }
        write_text(uniformity_path, uni_csv);
        write_autocorrelation_csv(acf_path, acf);

        Manifest manifest = Manifest::load(out_dir);
        for (const auto& p : {report_path, battery_path, pvalues_path, uniformity_path, acf_path}) {
            manifest.add_file(p);
        }
        manifest.section("test") = {{"bits_file", fs::relative(bits_path, out_dir).generic_string()},
                                    {"bits", res.bits},
                                    {"m", s.m},
                                    {"all_pass", res.all_pass}};
        manifest.save();
    });
    std::string verdict = "all tests pass";
    if (!res.all_pass) {
        verdict = "outside acceptance:";
        for (const auto& t : res.battery.tests) {
            if (!t.proportion_ok || !t.uniformity_ok) {
                verdict += " " + t.test_name;
            }
        }
    }
    log(opt, "test", std::to_string(res.battery.m) + " sequences; " + verdict);
    return res;
}

laser::FitResult cmd_fit(const PipelineConfig& cfg, const fs::path& out_dir, const RunOptions& opt) {
    run_stage("config", [&] {
        cfg.validate();
        if (cfg.laser.reference_trace.empty()) {
            throw ConfigError("fit: laser.reference_trace is not set");
        }
    });
    ensure_dir(out_dir);
    auto fit = run_stage("fit", [&] { return run_fit(cfg, out_dir, opt); });
    run_stage("write", [&] {
        Manifest manifest = Manifest::load(out_dir);
        for (const auto& p : fit.files) {
            manifest.add_file(p);
        }
        manifest.section("fit") = {{"params", params_json(fit.result.params)},
                                   {"rms_deviation_w", fit.result.rms_deviation},
                                   {"reference_trace", cfg.laser.reference_trace.filename().string()}};
        manifest.save();
    });
    return fit.result;
}

RunAllResult cmd_run_all(const PipelineConfig& cfg, const RunOptions& opt) {
    RunAllResult res;
    res.simulate = cmd_simulate(cfg, opt);
    const fs::path dir = cfg.run.out_dir;
    res.certify = cmd_certify(res.simulate.samples, cfg, dir / "entropy_report.json", opt);
    if (!res.certify.passed) {
        res.exit_code = exit_below_threshold;
        return res;
    }
    res.extract = cmd_extract(res.simulate.samples, res.certify.report_path, dir / "bits.bin", cfg, opt);
    res.test = cmd_test(res.extract->output, cfg, dir, std::nullopt, opt);
    return res;
}

} // namespace pdqrng::pipeline
