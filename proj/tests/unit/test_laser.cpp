#include "oracles.hpp"

#include "pdqrng/errors.hpp"
#include "pdqrng/laser/filter.hpp"
#include "pdqrng/laser/params.hpp"
#include "pdqrng/laser/phase_diffusion.hpp"
#include "pdqrng/laser/rate_equations.hpp"
#include "pdqrng/laser/steady_state.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace pdqrng;
using namespace pdqrng::laser;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Trajectory flat_trajectory(double rsp, double photons, std::size_t n, double dt) {
    Trajectory t;
    t.dt = dt;
    for (std::size_t i = 0; i < n; ++i) {
        t.times.push_back(static_cast<double>(i) * dt);
        t.photons.push_back(photons);
        t.carriers.push_back(0.0);
        t.spont_rate.push_back(rsp);
        t.phase_variance.push_back(0.0);
        t.output_power.push_back(0.0);
    }
    return t;
}

} // namespace

TEST_CASE("reference parameters satisfy the consistency relations") {
    const LaserParams p = reference_params();
    CHECK_NOTHROW(p.validate());
    CHECK(p.cavity_decay == doctest::Approx(kSpeedOfLight * (1.4 / 500e-6 + 4500.0) / 4.33).epsilon(1e-12));
    CHECK(p.carriers_transparency == doctest::Approx(3.42e7).epsilon(0.005));
    CHECK(p.spontaneous_rate(5e7) == doctest::Approx(5e7 * 1e9 * 8.8e-4));

    LaserParams bad = p;
    bad.carriers_transparency = bad.carriers_threshold * 1.01;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.gain_per_carrier *= 1.001;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.spont_coupling = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_NOTHROW(bad.validate(true));
}

TEST_CASE("steady state near threshold reproduces the reference operating point") {
    const auto in = steady_state_inputs(reference_device(), 7.7e5);
    const SteadyState ss = steady_state_near_threshold(10e-3, 0.3e-3, in);
    CHECK(ss.carriers_threshold == doctest::Approx(5.62e7).epsilon(0.05));
    CHECK(ss.spont_coupling == doctest::Approx(8.8e-4).epsilon(0.05));

    // Substitute back into the stationary equations.
    const double root = std::sqrt(1.0 + ss.photons / in.photon_saturation);
    const double photon_eq = in.cavity_decay * (1.0 / root - 1.0) * ss.photons +
                             ss.spont_coupling * in.carrier_decay * ss.carriers_threshold;
    const double carrier_eq = 10e-3 / in.electron_charge - in.carrier_decay * ss.carriers_threshold -
                              in.cavity_decay * ss.photons / root;
    CHECK(std::abs(photon_eq) / (in.cavity_decay * ss.photons * (1.0 - 1.0 / root)) < 1e-8);
    CHECK(std::abs(carrier_eq) / (10e-3 / in.electron_charge) < 1e-8);
    const auto r = steady_state_residuals(ss, in);
    CHECK(std::abs(r.photon) < 1e-8);
    CHECK(std::abs(r.carrier) < 1e-8);
}

TEST_CASE("steady state reports the bracket when the current cannot sustain the power") {
    const auto in = steady_state_inputs(reference_device(), 7.7e5);
    try {
        steady_state_near_threshold(1e-4, 0.3e-3, in);
        FAIL("expected NoSolutionError");
    } catch (const NoSolutionError& e) {
        CHECK(e.lower() == 0.0);
        CHECK(e.upper() > 0.0);
        CHECK(e.upper() < 0.3e-3 / in.power_per_photon);
    }
}

TEST_CASE("vanishing spontaneous coupling forces the threshold photon number to zero") {
    LaserParams p = reference_params();
    const double current = p.electron_charge * p.carrier_decay * p.carriers_threshold;
    double prev = steady_state_photons(current, p);
    for (double r0 : {1e-5, 1e-7, 1e-9, 1e-11}) {
        p.spont_coupling = r0;
        const double s = steady_state_photons(current, p);
        CHECK(s < prev);
        prev = s;
    }
    // At threshold s grows like sqrt(R0).
    p.spont_coupling = 1e-13;
    CHECK(steady_state_photons(current, p) / prev == doctest::Approx(0.1).epsilon(0.02));
    CHECK(prev < 1.0);
}

TEST_CASE("constant threshold current converges to the steady state") {
    const LaserParams p = reference_params();
    const auto traj = integrate_rate_equations(p, constant_drive(10e-3, 30e-9, 1e-12), 1.0, 0.0);
    const double s_ss = steady_state_photons(10e-3, p);
    CHECK(traj.photons.back() == doctest::Approx(s_ss).epsilon(1e-3));
    CHECK(p.output_power(traj.photons.back()) == doctest::Approx(0.3e-3).epsilon(0.05));
}

TEST_CASE("unpumped cavity decays") {
    LaserParams p = reference_params();
    p.spont_coupling = 0.0;
    const double n0 = 1e7;
    SUBCASE("photons fall monotonically to the floor") {
        const auto traj = integrate_rate_equations(p, constant_drive(0.0, 200e-12, 0.1e-12), 1e5, n0);
        for (std::size_t i = 1; i < traj.size(); ++i) {
            REQUIRE(traj.photons[i] <= traj.photons[i - 1]);
        }
        CHECK(traj.photons.back() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("carriers decay exponentially") {
        const auto traj = integrate_rate_equations(p, constant_drive(0.0, 2e-9, 1e-12), 1.0, n0);
        for (std::size_t i = 0; i < traj.size(); i += 100) {
            CHECK(traj.carriers[i] == doctest::Approx(n0 * std::exp(-p.carrier_decay * traj.times[i])).epsilon(1e-3));
        }
    }
}

TEST_CASE("gain-switched trajectory invariants") {
    const LaserParams p = reference_params();
    const auto traj = integrate_rate_equations(p, reference_drive(8), 1.0, 0.0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        REQUIRE(traj.photons[i] >= 0.0);
        REQUIRE(traj.carriers[i] >= 0.0);
        REQUIRE(traj.spont_rate[i] == doctest::Approx(traj.carriers[i] * p.carrier_decay * p.spont_coupling));
        if (i > 0) {
            REQUIRE(traj.phase_variance[i] >= traj.phase_variance[i - 1]);
        }
    }
}

TEST_CASE("RK4 converges at high order when dt is halved") {
    const LaserParams p = reference_params();
    auto run = [&](std::size_t steps) {
        DriveWaveform d = reference_drive(3);
        d.dt = d.period() / static_cast<double>(steps);
        return integrate_rate_equations(p, d, 1.0, 0.0);
    };
    const auto coarse = run(500);
    const auto mid = run(1000);
    const auto fine = run(4000);
    auto max_err = [&](const Trajectory& t, std::size_t stride) {
        double e = 0.0;
        double peak = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            e = std::max(e, std::abs(t.photons[i] - fine.photons[i * stride]));
            peak = std::max(peak, fine.photons[i * stride]);
        }
        return e / peak;
    };
    const double e_coarse = max_err(coarse, 8);
    const double e_mid = max_err(mid, 4);
    CHECK(e_mid < 1e-3);
    CHECK(e_coarse / e_mid > 8.0);
}

TEST_CASE("drive waveform") {
    const double a = rf_amplitude_for_reverse_bias(15e-3, 0.4);
    CHECK(a == doctest::Approx(48.54e-3).epsilon(1e-3));
    DriveWaveform d = reference_drive(1);
    std::size_t negative = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        negative += d.current(d.period() * static_cast<double>(i) / static_cast<double>(n)) < 0.0;
    }
    CHECK(static_cast<double>(negative) / n == doctest::Approx(0.4).epsilon(1e-3));
    d.dt = 1.0 / (100.0 * d.prf);
    CHECK_THROWS_AS(d.validate(), ConfigError);
    CHECK_THROWS_AS(integrate_rate_equations(reference_params(), d, 1.0, 0.0), ConfigError);
}

TEST_CASE("phase variance of a constant integrand is exact") {
    LaserParams p = reference_params();
    const double r = 3e9;
    const double s = 250.0;
    const double dt = 1e-13;
    const auto traj = flat_trajectory(r, s, 2001, dt);
    const double expected = r * (1.0 + p.linewidth_enhancement * p.linewidth_enhancement) * 1e-10 / (2.0 * s);
    CHECK(accumulate_phase_variance(traj, p, 0.5e-10, 1.5e-10) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("phase variance is additive, linear in 1/s and scales with 1 + alpha^2") {
    const LaserParams p = reference_params();
    const auto traj = integrate_rate_equations(p, reference_drive(4), 1.0, 0.0);
    const double a = 0.3e-9;
    const double b = 0.4137e-9;
    const double c = 0.6e-9;
    const double ab = accumulate_phase_variance(traj, p, a, b);
    const double bc = accumulate_phase_variance(traj, p, b, c);
    const double ac = accumulate_phase_variance(traj, p, a, c);
    CHECK(ab + bc == doctest::Approx(ac).epsilon(1e-12));

    Trajectory doubled = traj;
    for (double& s : doubled.photons) {
        s *= 2.0;
    }
    CHECK(accumulate_phase_variance(doubled, p, a, c, std::nullopt) ==
          doctest::Approx(0.5 * accumulate_phase_variance(traj, p, a, c, std::nullopt)).epsilon(1e-12));

    LaserParams p0 = p;
    p0.linewidth_enhancement = 0.0;
    CHECK(accumulate_phase_variance(traj, p0, a, c) / ac == doctest::Approx(1.0 / (1.0 + 5.4 * 5.4)).epsilon(1e-13));
}

TEST_CASE("phase variance needs a floor when the cavity is empty") {
    const LaserParams p = reference_params();
    auto traj = flat_trajectory(1e9, 0.0, 100, 1e-12);
    CHECK_THROWS_AS(accumulate_phase_variance(traj, p, 0.0, 50e-12, std::nullopt), PreconditionError);
    CHECK(accumulate_phase_variance(traj, p, 0.0, 50e-12, 1.0) > 0.0);
}

TEST_CASE("reference drive diffuses the phase beyond full randomization") {
    const LaserParams p = reference_params();
    const auto drive = reference_drive(20);
    const auto traj = integrate_rate_equations(p, drive, 1.0, 0.0);
    const double t1 = traj.times.back();
    const double var = accumulate_phase_variance(traj, p, t1 - drive.period(), t1);
    CHECK(var > kTwoPi * kTwoPi);
}

TEST_CASE("wrapped Gaussian uniformity") {
    CHECK(wrapped_gaussian_uniformity_error(kTwoPi * kTwoPi) < 1e-8);
    CHECK(wrapped_gaussian_uniformity_error(1e4) < 1e-13);

    // Dense brute-force sum with a much wider truncation.
    const double var = 0.01;
    const double sd = std::sqrt(var);
    double worst = 0.0;
    for (int i = 0; i <= 1024; ++i) {
        const double theta = std::numbers::pi * i / 1024.0;
        double g = 0.0;
        for (int k = -60; k <= 60; ++k) {
            for (double sgn : {1.0, -1.0}) {
                const double x = sgn * theta + kTwoPi * k;
                g += std::exp(-0.5 * x * x / var) / (sd * std::sqrt(kTwoPi));
            }
        }
        CHECK(folded_gaussian_density(theta, var) == doctest::Approx(g).epsilon(1e-12));
        worst = std::max(worst, std::abs(g - 1.0 / std::numbers::pi) * std::numbers::pi);
    }
    CHECK(wrapped_gaussian_uniformity_error(var) == doctest::Approx(worst).epsilon(1e-12));

    double prev = wrapped_gaussian_uniformity_error(1.0);
    for (double v = 1.25; v < 60.0; v += 0.25) {
        const double e = wrapped_gaussian_uniformity_error(v);
        CHECK(e <= prev);
        prev = e;
    }
}

TEST_CASE("pulse phase sampling") {
    const double var = 9.45 * 9.45;
    const std::size_t n = 1000000;
    const auto phases = sample_pulse_phases(var, n, 11);
    REQUIRE(phases.size() == n);
    double m = 0.0;
    double q = 0.0;
    for (double x : phases) {
        m += x;
        q += x * x;
    }
    m /= n;
    const double sample_var = q / n - m * m;
    CHECK(std::abs(sample_var - var) < 3.0 * var * std::sqrt(2.0 / n));
    CHECK(sample_pulse_phases(var, 1000, 11) == std::vector<double>(phases.begin(), phases.begin() + 1000));

    const auto wide = sample_pulse_phases(kTwoPi * kTwoPi * 1.01, 100000, 5);
    std::vector<double> c(wide.size());
    std::transform(wide.begin(), wide.end(), c.begin(), [](double t) { return std::cos(t); });
    const double d = oracle::ks_statistic(c, [](double x) { return 1.0 - std::acos(x) / std::numbers::pi; });
    CHECK(d < oracle::ks_critical_1pct(c.size()));
}

TEST_CASE("single-pole detector filter") {
    CHECK(filter_time_constant(12.5e9) == doctest::Approx(28e-12).epsilon(1e-12));
    const double dt = 0.1e-12;
    const double tau = filter_time_constant(12.5e9);

    std::vector<double> step(4000, 0.0);
    std::fill(step.begin() + 1000, step.end(), 1.0);
    const auto y = low_pass_filter(step, dt, 12.5e9);
    const auto cross = std::find_if(y.begin(), y.end(), [](double v) { return v >= 1.0 - std::exp(-1.0); });
    const double t_cross = static_cast<double>(cross - y.begin() - 999) * dt;
    CHECK(std::abs(t_cross - tau) <= dt);

    const std::vector<double> dc(500, 2.5);
    for (double v : low_pass_filter(dc, dt, 12.5e9)) {
        CHECK(v == doctest::Approx(2.5));
    }

    std::vector<double> impulse(2000, 0.0);
    impulse[1] = 1.0;
    const auto h = low_pass_filter(impulse, dt, 12.5e9);
    const double rate = std::log(h[100] / h[1100]) / (1000 * dt);
    CHECK(rate == doctest::Approx(1.0 / tau).epsilon(0.01));
}

TEST_CASE("pulse measurement interpolates the half-maximum crossings") {
    const double dt = 1e-12;
    const double sigma = 20e-12;
    std::vector<double> g(400);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = (static_cast<double>(i) - 200.0) * dt;
        g[i] = 3.0 * std::exp(-0.5 * t * t / (sigma * sigma));
    }
    const auto pulse = measure_pulse(g, dt);
    CHECK(pulse.peak == doctest::Approx(3.0));
    CHECK(pulse.peak_time == doctest::Approx(200e-12));
    CHECK(pulse.fwhm == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma).epsilon(1e-3));
}
