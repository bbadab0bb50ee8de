#include "pdqrng/errors.hpp"
#include "pdqrng/extractor.hpp"
#include "pdqrng/pipeline/commands.hpp"
#include "pdqrng/pipeline/config.hpp"
#include "pdqrng/pipeline/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pdqrng;
using namespace pdqrng::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pdqrng_unit_" + name);
    fs::remove_all(dir);
    return dir;
}

PipelineConfig small_config(const fs::path& dir) {
    PipelineConfig cfg = default_config();
    cfg.drive.periods = 4;
    cfg.run.pulses = 200000;
    cfg.run.out_dir = dir;
    cfg.stats.seq_len = 100000;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PipelineConfig reparse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

} // namespace

TEST_CASE("configuration round trips through INI") {
    const PipelineConfig def = default_config();
    CHECK_NOTHROW(def.validate());
    const std::string text = to_ini(def);
    CHECK(to_ini(reparse(text)) == text);

    PipelineConfig cfg = def;
    cfg.laser.photon_saturation = 1.234567890123e6;
    cfg.laser.device.mirror_loss = 2801.5;
    cfg.drive.rf_amplitude = 0.0485;
    cfg.interferometer.mzi.static_phase = 0.1 + 0.2;
    cfg.run.phase_variance = 89.3;
    cfg.run.seed = 0xFFFFFFFFFFFFFFFFull;
    cfg.extraction.reduction_factor = 1.9006;
    cfg.extraction.hash = "sha3-512";
    cfg.fit.candidate_lengths = {400e-6, 500e-6, 600e-6};
    const PipelineConfig back = reparse(to_ini(cfg));
    CHECK(to_ini(back) == to_ini(cfg));
    CHECK(back.laser.photon_saturation == cfg.laser.photon_saturation);
    CHECK(back.interferometer.mzi.static_phase == 0.1 + 0.2);
    CHECK(back.run.seed == 0xFFFFFFFFFFFFFFFFull);
    CHECK(back.fit.candidate_lengths.size() == 3);
    CHECK(*back.drive.rf_amplitude == 0.0485);
    CHECK(!reparse(text).run.phase_variance.has_value());
    CHECK(config_sha256(back) == config_sha256(cfg));
    CHECK(config_sha256(def) != config_sha256(cfg));
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(reparse("[laser]\nunknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(reparse("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(reparse("[run]\npulses = many\n"), ConfigError);
    CHECK_THROWS_AS(reparse("[adc]\nresolution_bits = 20\n").validate(), ConfigError);
    CHECK_THROWS_AS(reparse("[laser]\nreference_trace = /no/such/file.csv\n").validate(), ConfigError);
    CHECK_THROWS_AS(reparse("[extraction]\nreduction_factor = 0.5\n").validate(), ConfigError);
    CHECK(reparse("[run]\npulses = 5\n").run.pulses == 5);

    PipelineConfig cfg = default_config();
    cfg.run.pulses = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("zero pulses fail before any output is written") {
    const fs::path dir = scratch("zero");
    PipelineConfig cfg = small_config(dir);
    cfg.run.pulses = 0;
    try {
        cmd_simulate(cfg);
        FAIL("expected a validation failure");
    } catch (const StageError& e) {
        CHECK(e.exit_code() == exit_validation);
        CHECK(e.stage() == "config");
    }
    CHECK(!fs::exists(dir));
}

TEST_CASE("simulation is reproducible and documents its outputs") {
    const fs::path a = scratch("sim_a");
    const auto ra = cmd_simulate(small_config(a));
    CHECK(ra.records == 199999);
    CHECK(ra.phase_variance > 4.0 * std::numbers::pi * std::numbers::pi);
    const char* outputs[] = {"samples.bin", "pulses.csv", "trajectory.csv", "histograms.csv",
                             "raw_autocorrelation.csv", "config.ini", "manifest.json"};
    std::vector<std::string> first;
    for (const char* f : outputs) {
        REQUIRE(fs::exists(a / f));
        first.push_back(slurp(a / f));
    }
    cmd_simulate(small_config(a), RunOptions{4, nullptr});
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(slurp(a / outputs[i]) == first[i]);
    }

    const fs::path b = scratch("sim_b");
    PipelineConfig other = small_config(b);
    other.run.seed = 2;
    cmd_simulate(other);
    CHECK(slurp(a / "samples.bin") != slurp(b / "samples.bin"));

    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    for (const char* section : {"run", "laser", "arm_statistics", "adc", "files"}) {
        CHECK(manifest.contains(section));
    }
    CHECK(manifest["run"]["seed"] == 1);
    for (const auto& [name, digest] : manifest["files"].items()) {
        CHECK(digest.get<std::string>() == sha256_file(a / name));
    }
    CHECK(manifest["files"].contains("samples.bin"));

    // The written config reproduces the run.
    const PipelineConfig saved = load_config(a / "config.ini");
    CHECK(to_ini(saved) == to_ini(small_config(a)));
}

TEST_CASE("certification from explicit statistics") {
    const fs::path dir = scratch("certify");
    PipelineConfig cfg = small_config(dir);
    cfg.certify.explicit_statistics = true;
    cfg.certify.var_out = 1.4e-6;
    cfg.certify.var_u1 = 2.0e-9;
    cfg.certify.var_u2 = 2.1e-9;
    cfg.certify.var_noise = 1.45e-10;
    cfg.certify.mean_sqrt_u1_sq = 0.97e-3;
    cfg.certify.mean_sqrt_u2_sq = 0.90e-3;
    fs::create_directories(dir);
    const auto r = cmd_certify({}, cfg, dir / "entropy_report.json");
    CHECK(r.visibility.value == doctest::Approx(0.894).epsilon(1e-3));
    CHECK(r.report.span == doctest::Approx(3.34e-3).epsilon(0.01));
    CHECK(r.report.h_closed_form >= 7.28);
    CHECK(r.report.h_closed_form <= 7.38);
    CHECK(r.passed);
    const auto doc = nlohmann::json::parse(slurp(dir / "entropy_report.json"));
    for (const char* key : {"visibility", "u_min_w", "u_max_w", "span_w", "h_exact_bits", "h_closed_form_bits",
                            "first_bin_prob", "reduction_factor", "bit_rate_bps"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc.contains("provenance_var_out"));
}

TEST_CASE("zero visibility stops the pipeline below threshold") {
    const fs::path dir = scratch("novis");
    PipelineConfig cfg = small_config(dir);
    cfg.interferometer.mzi.visibility = 0.0;
    const auto r = cmd_run_all(cfg);
    CHECK(r.exit_code == exit_below_threshold);
    CHECK(!r.certify.passed);
    CHECK(!r.extract.has_value());
    CHECK(fs::exists(dir / "entropy_report.json"));
}

TEST_CASE("extraction and testing at file level") {
    const fs::path dir = scratch("files");
    PipelineConfig cfg = small_config(dir);
    const auto all = cmd_run_all(cfg);
    REQUIRE(all.exit_code == exit_ok);
    REQUIRE(all.extract.has_value());
    const auto& ex = *all.extract;
    CHECK(ex.reduction_factor == doctest::Approx(all.certify.report.reduction_factor));
    CHECK(ex.output_bits ==
          static_cast<std::size_t>(std::floor(ex.blocks * 512.0 / ex.reduction_factor)));
    const auto bits = read_bits(ex.output, ex.output_bits);
    CHECK(bits.size() == ex.output_bits);
    CHECK(fs::file_size(ex.output) == (ex.output_bits + 7) / 8);

    REQUIRE(all.test.has_value());
    CHECK(all.test->bits == ex.output_bits);
    CHECK(all.test->battery.m == ex.output_bits / cfg.stats.seq_len);
    for (const char* f : {"battery_report.json", "battery.csv", "pvalues.csv", "uniformity.csv", "autocorrelation.csv"}) {
        CHECK(fs::exists(dir / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    for (const char* section : {"certification", "extraction", "test"}) {
        CHECK(manifest.contains(section));
    }

    // An explicit override wins over the report.
    PipelineConfig over = cfg;
    over.extraction.reduction_factor = 2.0;
    const auto ex2 = cmd_extract(dir / "samples.bin", dir / "entropy_report.json", dir / "bits_rf2.bin", over);
    CHECK(ex2.output_bits == ex2.blocks * 256);
    over.extraction.reduction_factor = 0.5;
    CHECK_THROWS(cmd_extract(dir / "samples.bin", dir / "entropy_report.json", dir / "bits_bad.bin", over));
    CHECK(!fs::exists(dir / "bits_bad.bin"));
}
