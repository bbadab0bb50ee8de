#include "oracles.hpp"

#include "pdqrng/bits.hpp"
#include "pdqrng/errors.hpp"
#include "pdqrng/random.hpp"
#include "pdqrng/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace pdqrng;
using namespace pdqrng::stats;

namespace {

BitBuffer from_string(const std::string& s) {
    BitBuffer b;
    for (char c : s) {
        b.push_back(c == '1');
    }
    return b;
}

BitBuffer random_bits(std::size_t n, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    BitBuffer b;
    b.reserve_bits(n);
    for (std::size_t i = 0; i < n; i += 64) {
        b.append(rng(), static_cast<unsigned>(std::min<std::size_t>(64, n - i)));
    }
    return b;
}

} // namespace

TEST_CASE("first-level tests reproduce the worked examples") {
    CHECK(monobit_test(from_string("1011010101").view()) == doctest::Approx(0.527089).epsilon(1e-5));
    CHECK(block_frequency_test(from_string("0110011010").view(), 3) == doctest::Approx(0.801252).epsilon(1e-5));
    CHECK(runs_test(from_string("1001101011").view()) == doctest::Approx(0.147232).epsilon(1e-5));
}

TEST_CASE("all-zero stream is rejected") {
    const BitBuffer zeros(std::vector<std::uint8_t>(125000, 0), 1000000);
    CHECK(monobit_test(zeros.view()) < 1e-10);
    CHECK(block_frequency_test(zeros.view()) < 1e-10);
    CHECK(runs_test(zeros.view()) == 0.0);

    const BitBuffer stream(std::vector<std::uint8_t>(125000 * 4, 0), 4000000);
    const auto r = run_battery(stream.view(), 1000000, 0.01);
    for (const auto& t : r.summary.tests) {
        CHECK(t.passed == 0);
        CHECK(t.proportion < r.summary.interval.lower);
        CHECK(!t.proportion_ok);
    }
    for (const auto& o : r.outcomes) {
        CHECK(!o.pass);
        CHECK(o.p_value >= 0.0);
        CHECK(o.p_value <= 1.0);
    }
}

TEST_CASE("monobit p-values are uniform under the null") {
    const std::size_t sequences = 10000;
    const BitBuffer bits = random_bits(sequences * 1024, 99);
    std::vector<double> p;
    for (std::size_t i = 0; i < sequences; ++i) {
        p.push_back(monobit_test(bits.view().subview(i * 1024, 1024)));
    }
    // The discrete statistic puts atoms on the p-values, so compare against the
    // exact binomial distribution of the p-value rather than the continuous uniform.
    const double n = 1024.0;
    auto exact_cdf = [&](double x) {
        // P(p <= x) = P(|S| >= s*) where p = erfc(|S| / sqrt(2n)).
        double mass = 0.0;
        for (int k = 0; k <= 1024; ++k) {
            const double s = std::abs(2.0 * k - n);
            if (std::erfc(s / std::sqrt(2.0 * n)) <= x * (1.0 + 1e-12)) {
                mass += std::exp(std::lgamma(n + 1) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1) - n * std::log(2.0));
            }
        }
        return mass;
    };
    std::sort(p.begin(), p.end());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); i += 97) {
        const double x = p[i];
        const auto below = std::upper_bound(p.begin(), p.end(), x) - p.begin();
        d = std::max(d, std::abs(static_cast<double>(below) / p.size() - exact_cdf(x)));
    }
    CHECK(d < oracle::ks_critical_1pct(p.size()));
}

TEST_CASE("autocorrelation") {
    std::vector<double> alt(100000);
    for (std::size_t i = 0; i < alt.size(); ++i) {
        alt[i] = i % 2 == 0 ? 1.0 : -1.0;
    }
    CHECK(autocorrelation(alt, 3)[0] == doctest::Approx(-1.0).epsilon(1e-4));

    Xoshiro256pp rng(3);
    std::vector<double> base(5);
    for (auto& v : base) {
        v = rng.uniform01();
    }
    std::vector<double> periodic(100000);
    for (std::size_t i = 0; i < periodic.size(); ++i) {
        periodic[i] = base[i % 5];
    }
    CHECK(autocorrelation(periodic, 5)[4] == doctest::Approx(1.0).epsilon(1e-3));

    const auto full = autocorrelation(periodic, 5, true);
    CHECK(full.size() == 6);
    CHECK(full[0] == doctest::Approx(1.0));

    std::vector<double> iid(1000000);
    for (auto& v : iid) {
        v = rng.uniform01();
    }
    const auto r = autocorrelation(iid, 50);
    for (double v : r) {
        CHECK(std::abs(v) <= 1.0);
    }
    double worst = 0.0;
    for (double v : r) {
        worst = std::max(worst, std::abs(v));
    }
    CHECK(worst < 5.0 / std::sqrt(1e6));

    std::vector<double> walk(5000);
    double acc = 0.0;
    for (auto& v : walk) {
        acc += rng.uniform01() - 0.5;
        v = acc;
    }
    for (double v : autocorrelation(walk, 100)) {
        CHECK(std::abs(v) <= 1.0);
    }

    CHECK_THROWS_AS(autocorrelation(std::vector<double>(100, 2.0), 5), DegenerateInputError);
    CHECK_THROWS_AS(autocorrelation(std::vector<double>(5, 2.0), 5), PreconditionError);
    CHECK_THROWS_AS(autocorrelation(iid, 0), PreconditionError);
}

TEST_CASE("symbol uniformity") {
    std::vector<std::uint32_t> exact;
    for (int r = 0; r < 10; ++r) {
        for (std::uint32_t s = 0; s < 128; ++s) {
            exact.push_back(s);
        }
    }
    const auto u = uniformity_deviation(exact, 7);
    for (double d : u.deviation) {
        CHECK(d == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(u.sigma == doctest::Approx(std::sqrt((1.0 / 128) * (127.0 / 128) / 1280)));

    const std::vector<std::uint32_t> repeated(1000, 17);
    const auto one = uniformity_deviation(repeated, 7);
    CHECK(one.deviation[17] == doctest::Approx(1.0 - 1.0 / 128));
    CHECK(one.counts[17] == 1000);

    CHECK_THROWS_AS(uniformity_deviation(std::vector<std::uint32_t>(10, 0), 7), PreconditionError);
    CHECK_THROWS_AS(uniformity_deviation(std::vector<std::uint32_t>(200, 128), 7), PreconditionError);

    const BitBuffer b = from_string("10000001111111000000100");
    const auto sym = symbols_from_bits(b.view(), 7);
    CHECK(sym == std::vector<std::uint32_t>{0b1000000, 0b1111111, 0b0000001});
}

TEST_CASE("proportion interval") {
    const auto i = proportion_interval(0.01, 1500);
    CHECK(i.center == doctest::Approx(0.99));
    CHECK(i.lower == doctest::Approx(0.9823).epsilon(1e-4));
    CHECK(i.upper == doctest::Approx(0.9977).epsilon(1e-4));
}

TEST_CASE("second-level uniformity") {
    std::vector<double> even;
    for (int i = 0; i < 100; ++i) {
        even.push_back((i % 10 + 0.5) / 10.0);
    }
    CHECK(pvalue_uniformity(even) == doctest::Approx(1.0));

    const std::vector<double> clumped(100, 0.05);
    CHECK(pvalue_uniformity(clumped) < 1e-4);

    auto perm = even;
    perm[3] = 0.91;
    const double before = pvalue_uniformity(perm);
    std::reverse(perm.begin(), perm.end());
    CHECK(pvalue_uniformity(perm) == before);

    CHECK_THROWS_AS(pvalue_uniformity(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(pvalue_uniformity(std::vector<double>(20, 1.5)), ValidationError);
    CHECK_THROWS_AS(pvalue_uniformity(std::vector<double>(5, 0.5)), PreconditionError);

    // Edges: 1.0 falls in the last bin.
    std::vector<double> edges(10, 1.0);
    CHECK_NOTHROW(pvalue_uniformity(edges));
}

TEST_CASE("second-level p-values are uniform under the null") {
    Xoshiro256pp rng(17);
    std::vector<double> t(10000);
    std::vector<double> p(1000);
    for (auto& v : t) {
        for (auto& x : p) {
            x = rng.uniform01();
        }
        v = pvalue_uniformity(p);
    }
    CHECK(oracle::ks_statistic(t, [](double x) { return std::clamp(x, 0.0, 1.0); }) <
          oracle::ks_critical_1pct(t.size()));
}

TEST_CASE("chi-square goodness of fit") {
    const std::vector<std::uint64_t> counts{10, 20, 30, 40};
    const std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
    const auto fit = chi_square_gof(counts, probs);
    CHECK(fit.statistic == doctest::Approx(0.0));
    CHECK(fit.dof == 3);
    CHECK(fit.p_value == doctest::Approx(1.0));

    const std::vector<std::uint64_t> skew{40, 30, 20, 10};
    const auto bad = chi_square_gof(skew, probs);
    const double expected = 900.0 / 10 + 100.0 / 20 + 100.0 / 30 + 900.0 / 40;
    CHECK(bad.statistic == doctest::Approx(expected));
    CHECK(bad.p_value == doctest::Approx(boost::math::gamma_q(1.5, expected / 2.0)).epsilon(1e-10));

    const std::vector<std::uint64_t> sparse{1, 2, 1, 0, 3, 93};
    const std::vector<double> sp{0.01, 0.01, 0.01, 0.01, 0.04, 0.92};
    const auto pooled = chi_square_gof(sparse, sp);
    CHECK(pooled.merged_bins == 2);
    CHECK(pooled.dof == 1);
}

TEST_CASE("battery on a good generator") {
    const std::size_t seq = 100000;
    const BitBuffer bits = random_bits(seq * 100, 2718);
    const auto r = run_battery(bits.view(), seq, 0.01, 2);
    CHECK(r.summary.m == 100);
    CHECK(r.summary.s_count == 100);
    CHECK(r.outcomes.size() == 300);
    REQUIRE(r.summary.tests.size() == battery_tests().size());
    for (const auto& t : r.summary.tests) {
        CHECK(t.proportion_ok);
        CHECK(t.uniformity_ok);
        CHECK(t.p_value_t > 1e-4);
    }
    const auto again = run_battery(bits.view(), seq, 0.01, 1);
    for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
        CHECK(again.outcomes[i].p_value == r.outcomes[i].p_value);
    }
    CHECK_THROWS_AS(run_battery(bits.view(), seq * 60, 0.01), ConfigError);

    const auto few = run_battery(bits.view(), seq * 20, 0.01);
    CHECK(few.summary.m == 5);
    for (const auto& t : few.summary.tests) {
        CHECK(std::isnan(t.p_value_t));
        CHECK(!t.uniformity_ok);
    }
}
