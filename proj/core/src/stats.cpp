#include "pdqrng/stats.hpp"

#include "pdqrng/errors.hpp"
#include "pdqrng/special_functions.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace pdqrng::stats {

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag, bool include_zero) {
    if (max_lag < 1 || x.size() <= max_lag) {
        throw PreconditionError("autocorrelation: need size > max_lag >= 1");
    }
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::vector<double> d(x.size());
    std::transform(x.begin(), x.end(), d.begin(), [mean](double v) { return v - mean; });
    const double denom = std::inner_product(d.begin(), d.end(), d.begin(), 0.0);
    if (!(denom > 0)) {
        throw DegenerateInputError("autocorrelation: input has zero variance");
    }
    std::vector<double> r;
    r.reserve(max_lag + 1);
    if (include_zero) {
        r.push_back(1.0);
    }
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double num = std::inner_product(d.begin(), d.end() - static_cast<std::ptrdiff_t>(k),
                                              d.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
        r.push_back(num / denom);
    }
    return r;
}

UniformityDeviation uniformity_deviation(std::span<const std::uint32_t> symbols, int k) {
    if (k < 1 || k > 24) {
        throw PreconditionError("uniformity_deviation: k must lie in [1, 24]");
    }
    const std::size_t bins = std::size_t{1} << k;
    if (symbols.size() < bins) {
        throw PreconditionError("uniformity_deviation: need at least 2^k symbols");
    }
    UniformityDeviation out;
    out.counts.assign(bins, 0);
    for (std::uint32_t s : symbols) {
        if (s >= bins) {
            throw PreconditionError("uniformity_deviation: symbol out of range");
        }
        ++out.counts[s];
    }
    const double n = static_cast<double>(symbols.size());
    const double p = 1.0 / static_cast<double>(bins);
    out.deviation.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out.deviation[i] = static_cast<double>(out.counts[i]) / n - p;
    }
    out.sigma = std::sqrt(p * (1.0 - p) / n);
    return out;
}

std::vector<std::uint32_t> symbols_from_bits(BitView bits, int k) {
    if (k < 1 || k > 32) {
        throw PreconditionError("symbols_from_bits: k must lie in [1, 32]");
    }
    const auto w = static_cast<std::size_t>(k);
    std::vector<std::uint32_t> out(bits.size() / w);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint32_t>(bits.word(i * w, static_cast<unsigned>(k)));
    }
    return out;
}

double monobit_test(BitView bits) {
    if (bits.empty()) {
        throw PreconditionError("monobit_test: empty sequence");
    }
    const double n = static_cast<double>(bits.size());
    const double sum = 2.0 * static_cast<double>(bits.count_ones()) - n;
    return std::erfc(std::abs(sum) / std::sqrt(2.0 * n));
}

double block_frequency_test(BitView bits, std::size_t block) {
    if (block == 0 || bits.size() < block) {
        throw PreconditionError("block_frequency_test: sequence shorter than one block");
    }
    const std::size_t blocks = bits.size() / block;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < blocks; ++i) {
        const double pi = static_cast<double>(bits.subview(i * block, block).count_ones()) / static_cast<double>(block);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(block);
    return incomplete_gamma_upper_regularized(0.5 * static_cast<double>(blocks), 0.5 * chi2);
}

double runs_test(BitView bits) {
    if (bits.size() < 2) {
        throw PreconditionError("runs_test: sequence too short");
    }
    const double n = static_cast<double>(bits.size());
    const double pi = static_cast<double>(bits.count_ones()) / n;
    // Frequency prerequisite: the runs test is not applicable when it fails.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        return 0.0;
    }
    const double v = static_cast<double>(bits.count_transitions()) + 1.0;
    const double q = pi * (1.0 - pi);
    return std::erfc(std::abs(v - 2.0 * n * q) / (2.0 * std::sqrt(2.0 * n) * q));
}

ProportionInterval proportion_interval(double alpha, std::size_t m) {
    if (!(alpha > 0 && alpha < 1) || m == 0) {
        throw PreconditionError("proportion_interval: need 0 < alpha < 1 and m > 0");
    }
    const double c = 1.0 - alpha;
    const double half = 3.0 * std::sqrt(c * alpha / static_cast<double>(m));
    return {c, c - half, c + half};
}

double pvalue_uniformity(std::span<const double> p_values) {
    if (p_values.empty()) {
        throw ValidationError("pvalue_uniformity: no P-values");
    }
    if (p_values.size() < 10) {
        throw PreconditionError("pvalue_uniformity: need at least 10 P-values");
    }
    std::array<double, 10> f{};
    for (double p : p_values) {
        if (!(p >= 0 && p <= 1)) {
            throw ValidationError("pvalue_uniformity: P-value outside [0, 1]");
        }
        f[std::min<std::size_t>(9, static_cast<std::size_t>(p * 10.0))] += 1.0;
    }
    const double e = static_cast<double>(p_values.size()) / 10.0;
    double chi2 = 0.0;
    for (double fi : f) {
        chi2 += (fi - e) * (fi - e) / e;
    }
    return incomplete_gamma_upper_regularized(4.5, 0.5 * chi2);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> probabilities,
                               double min_expected) {
    if (counts.size() != probabilities.size() || counts.empty()) {
        throw PreconditionError("chi_square_gof: counts and probabilities must be non-empty and equal length");
    }
    const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    if (!(n > 0)) {
        throw DegenerateInputError("chi_square_gof: no observations");
    }
    std::vector<double> obs;
    std::vector<double> exp;
    double o = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        o += static_cast<double>(counts[i]);
        e += probabilities[i] * n;
        if (e >= min_expected) {
            obs.push_back(o);
            exp.push_back(e);
            o = 0.0;
            e = 0.0;
        }
    }
    if (o > 0.0 || e > 0.0) {
        if (exp.empty()) {
            obs.push_back(o);
            exp.push_back(e);
        } else {
            obs.back() += o;
            exp.back() += e;
        }
    }
    if (exp.size() < 2) {
        throw DegenerateInputError("chi_square_gof: fewer than two pooled bins");
    }
    ChiSquareResult r;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        if (!(exp[i] > 0)) {
            throw DegenerateInputError("chi_square_gof: observations in a bin of zero probability");
        }
        r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    }
    r.merged_bins = exp.size();
    r.dof = exp.size() - 1;
    r.p_value = incomplete_gamma_upper_regularized(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic);
    return r;
}

std::vector<std::string> battery_tests() {
    return {"monobit", "block_frequency", "runs"};
}

BatteryResult run_battery(BitView bits, std::size_t seq_len, double alpha, unsigned threads) {
    if (seq_len == 0) {
        throw ConfigError("run_battery: sequence length must be > 0");
    }
    const std::size_t m = bits.size() / seq_len;
    if (m < 2) {
        throw ConfigError("run_battery: need at least two sequences, got " + std::to_string(m));
    }
    if (!(alpha > 0 && alpha < 1)) {
        throw ConfigError("run_battery: alpha must lie in (0, 1)");
    }
    const auto names = battery_tests();
    const std::size_t tests = names.size();
    std::vector<double> p(m * tests);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < m; i = next++) {
            const BitView seq = bits.subview(i * seq_len, seq_len);
            p[i * tests + 0] = monobit_test(seq);
            p[i * tests + 1] = block_frequency_test(seq, 128);
            p[i * tests + 2] = runs_test(seq);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m)));
    if (workers == 1) {
        work();
    } else {
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < workers; ++t) {
                pool.emplace_back([&] {
                    try {
                        work();
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        failure = std::current_exception();
                        next = m;
                    }
                });
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    BatteryResult res;
    auto& s = res.summary;
    s.m = m;
    s.seq_len = seq_len;
    s.s_count = m;
    s.alpha = alpha;
    s.interval = proportion_interval(alpha, m);
    res.outcomes.reserve(m * tests);
    for (std::size_t t = 0; t < tests; ++t) {
        TestSummary ts;
        ts.test_name = names[t];
        ts.p_values.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double pv = p[i * tests + t];
            const bool pass = pv >= alpha;
            ts.p_values.push_back(pv);
            ts.passed += pass ? 1 : 0;
            res.outcomes.push_back({names[t], pv, pass, i});
        }
        ts.proportion = static_cast<double>(ts.passed) / static_cast<double>(m);
        ts.p_value_t = m >= 10 ? pvalue_uniformity(ts.p_values) : std::numeric_limits<double>::quiet_NaN();
        ts.proportion_ok = ts.proportion >= s.interval.lower && ts.proportion <= s.interval.upper;
        ts.uniformity_ok = ts.p_value_t >= 1e-4;
        s.tests.push_back(std::move(ts));
    }
    return res;
}

} // namespace pdqrng::stats
