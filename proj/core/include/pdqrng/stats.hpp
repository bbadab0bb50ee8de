#pragma once

#include "pdqrng/bits.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdqrng::stats {

/// Normalized autocorrelation r(k) for k = 1..max_lag (k = 0..max_lag when
/// `include_zero`). Throws PreconditionError unless size > max_lag >= 1 and
/// DegenerateInputError for constant input.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag, bool include_zero = false);

struct UniformityDeviation {
    std::vector<std::uint64_t> counts;
    std::vector<double> deviation;  // P_i - 2^-k
    double sigma = 0;               // sqrt(2^-k (1 - 2^-k) / N)
};

/// Throws PreconditionError if fewer than 2^k symbols are given or a symbol is out of range.
UniformityDeviation uniformity_deviation(std::span<const std::uint32_t> symbols, int k);

/// Consecutive non-overlapping k-bit symbols, MSB first; a partial tail is ignored.
std::vector<std::uint32_t> symbols_from_bits(BitView bits, int k);

double monobit_test(BitView bits);
double block_frequency_test(BitView bits, std::size_t block = 128);
double runs_test(BitView bits);

struct ProportionInterval {
    double center = 0;
    double lower = 0;
    double upper = 0;
};
/// 1 - alpha -/+ 3 sqrt(alpha (1 - alpha) / m).
ProportionInterval proportion_interval(double alpha, std::size_t m);

/// Second-level P-value of a set of first-level P-values: Pearson chi-square
/// over ten equal bins, then Q(9/2, chi2/2). Throws ValidationError on empty
/// input or values outside [0, 1], PreconditionError for fewer than 10 values.
double pvalue_uniformity(std::span<const double> p_values);

struct ChiSquareResult {
    double statistic = 0;
    std::size_t dof = 0;
    double p_value = 0;
    std::size_t merged_bins = 0;  // bins after pooling
};

/// Pearson goodness of fit of observed counts against bin probabilities.
/// Adjacent bins are pooled from the left until each pooled bin expects at
/// least `min_expected` counts; a short remainder joins the last pool.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> probabilities,
                               double min_expected = 5.0);

struct TestOutcome {
    std::string test_name;
    double p_value = 0;
    bool pass = false;
    std::size_t sequence_id = 0;
};

struct TestSummary {
    std::string test_name;
    std::vector<double> p_values;  // one per sequence
    std::size_t passed = 0;
    double proportion = 0;
    double p_value_t = 0;          // NaN when fewer than 10 sequences
    bool proportion_ok = false;
    bool uniformity_ok = false;    // P_value_T >= 1e-4
};

struct BatterySummary {
    std::size_t m = 0;
    std::size_t seq_len = 0;
    std::size_t s_count = 0;
    double alpha = 0;
    ProportionInterval interval;
    std::vector<TestSummary> tests;
};

struct BatteryResult {
    std::vector<TestOutcome> outcomes;
    BatterySummary summary;
};

/// Names of the tests run by run_battery, in report order.
std::vector<std::string> battery_tests();

/// Splits `bits` into floor(size / seq_len) sequences and runs the test subset
/// on each. Throws ConfigError for fewer than two sequences.
BatteryResult run_battery(BitView bits, std::size_t seq_len, double alpha, unsigned threads = 1);

} // namespace pdqrng::stats
