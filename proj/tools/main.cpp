#include "pdqrng/pipeline/commands.hpp"
#include "pdqrng/pipeline/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using namespace pdqrng;
using namespace pdqrng::pipeline;

int main(int argc, char** argv) {
    CLI::App app{"Phase-diffusion QRNG simulator and analysis pipeline"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool print_defaults = false;
    bool quiet = false;
    app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "64-bit run seed (overrides [run] seed)");
    app.add_option("--out-dir", out_dir, "Output directory (overrides [run] out_dir)");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--print-defaults", print_defaults, "Print the reference configuration and exit");
    app.add_flag("-q,--quiet", quiet, "No progress output");

    auto* simulate = app.add_subcommand("simulate", "Laser, interferometer and ADC simulation");

    auto* certify = app.add_subcommand("certify", "Estimate visibility and certify min-entropy");
    std::string samples_path;
    std::string report_path;
    certify->add_option("--samples", samples_path, "16-bit sample file (default <out-dir>/samples.bin)");
    certify->add_option("--report", report_path, "Entropy report (default <out-dir>/entropy_report.json)");

    auto* extract = app.add_subcommand("extract", "Hash samples into uniform bits");
    std::string bits_path;
    bool text_bits = false;
    extract->add_option("--samples", samples_path, "16-bit sample file (default <out-dir>/samples.bin)");
    extract->add_option("--report", report_path, "Entropy report (default <out-dir>/entropy_report.json)");
    extract->add_option("--output", bits_path, "Packed bit file (default <out-dir>/bits.bin)");
    extract->add_flag("--text", text_bits, "Also write the bits as 0/1 text");

    auto* test = app.add_subcommand("test", "Statistical tests on a bit file");
    std::optional<std::size_t> bit_count;
    test->add_option("--bits", bits_path, "Packed bit file (default <out-dir>/bits.bin)");
    test->add_option("--bit-count", bit_count, "Number of valid bits (default: from the extraction manifest)");

    auto* fit = app.add_subcommand("fit", "Fit rate-equation parameters to the reference pulse trace");
    std::string trace_path;
    fit->add_option("--trace", trace_path, "Observed trace, time_s,power_w (overrides [laser] reference_trace)")
        ->check(CLI::ExistingFile);

    auto* run_all = app.add_subcommand("run-all", "simulate, certify, extract and test");

    CLI11_PARSE(app, argc, argv);

    if (print_defaults) {
        std::cout << to_ini(default_config());
        return exit_ok;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return exit_validation;
    }

    try {
        PipelineConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
        if (seed) {
            cfg.run.seed = *seed;
        }
        if (!out_dir.empty()) {
            cfg.run.out_dir = out_dir;
        }
        if (text_bits) {
            cfg.extraction.text_output = true;
        }
        if (!trace_path.empty()) {
            cfg.laser.reference_trace = trace_path;
        }
        const fs::path dir = cfg.run.out_dir;
        RunOptions opt{threads, quiet ? nullptr : &std::cerr};
        auto or_default = [](const std::string& s, const fs::path& d) { return s.empty() ? d : fs::path(s); };

        if (simulate->parsed()) {
            cmd_simulate(cfg, opt);
        } else if (certify->parsed()) {
            const auto res = cmd_certify(or_default(samples_path, dir / "samples.bin"), cfg,
                                         or_default(report_path, dir / "entropy_report.json"), opt);
            if (!res.passed) {
                std::cerr << "certification failed: H_exact = " << res.report.h_exact << " bits";
                for (const auto& w : res.report.warnings) {
                    std::cerr << "; " << w;
                }
                std::cerr << '\n';
                return exit_below_threshold;
            }
        } else if (extract->parsed()) {
            cmd_extract(or_default(samples_path, dir / "samples.bin"),
                        or_default(report_path, dir / "entropy_report.json"), or_default(bits_path, dir / "bits.bin"),
                        cfg, opt);
        } else if (test->parsed()) {
            cmd_test(or_default(bits_path, dir / "bits.bin"), cfg, dir, bit_count, opt);
        } else if (fit->parsed()) {
            cmd_fit(cfg, dir, opt);
        } else if (run_all->parsed()) {
            const auto res = cmd_run_all(cfg, opt);
            if (res.exit_code == exit_below_threshold) {
                std::cerr << "certification failed: H_exact = " << res.certify.report.h_exact << " bits\n";
            }
            return res.exit_code;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return exit_ok;
}
