#include "pdqrng/errors.hpp"
#include "pdqrng/laser/fit.hpp"
#include "pdqrng/laser/steady_state.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace pdqrng;
using namespace pdqrng::laser;

namespace {

FitSetup small_setup() {
    FitSetup setup;
    setup.device = reference_device();
    setup.drive = reference_drive(3);
    return setup;
}

FitOptions small_options() {
    FitOptions opt;
    opt.s_sat_min = 7.7e5 / 3.0;
    opt.s_sat_max = 7.7e5 * 3.0;
    opt.s_sat_points = 2;
    opt.gain_grid_points = 24;
    opt.refine_iterations = 24;
    return opt;
}

ObservedTrace synthetic_trace(const LaserParams& truth, const FitSetup& setup) {
    ObservedTrace obs;
    const double period = setup.drive.period();
    for (double t = 0.5 * period; t <= 2.9 * period; t += 2e-12) {
        obs.times.push_back(t);
    }
    obs.power = simulated_detection(truth, setup, obs.times);
    return obs;
}

} // namespace

TEST_CASE("fit recovers the generating parameters") {
    const FitSetup setup = small_setup();
    const double s_sat = 7.7e5;
    const SteadyState ss = steady_state_near_threshold(setup.threshold_current, setup.threshold_power,
                                                       steady_state_inputs(setup.device, s_sat));
    const LaserParams truth =
        make_laser_params(setup.device, s_sat, ss.carriers_threshold, ss.spont_coupling, 2.3e4);
    const ObservedTrace obs = synthetic_trace(truth, setup);

    const FitResult fit = fit_parameters(obs, {400e-6, 500e-6, 600e-6}, s_sat, setup, small_options());
    CHECK(fit.params.cavity_length == doctest::Approx(500e-6));
    CHECK(fit.params.photon_saturation == doctest::Approx(s_sat));
    CHECK(fit.params.gain_per_carrier == doctest::Approx(2.3e4).epsilon(0.1));
    CHECK(fit.params.carriers_threshold == doctest::Approx(ss.carriers_threshold));
    CHECK_NOTHROW(fit.params.validate());
    CHECK(fit.candidates.size() == 9);
    CHECK(!fit.provenance.empty());

    // Envelope holds within the tolerance at the chosen parameters.
    const auto sim = simulated_detection(fit.params, setup, obs.times);
    double peak = 0.0;
    for (double p : obs.power) {
        peak = std::max(peak, p);
    }
    for (std::size_t k = 0; k < sim.size(); ++k) {
        REQUIRE(sim[k] >= obs.power[k] - small_options().envelope_tolerance * peak * (1.0 + 1e-9));
    }
}

TEST_CASE("fit on a flat trace terminates") {
    const FitSetup setup = small_setup();
    ObservedTrace obs;
    for (double t = 0.0; t <= 2.5 * setup.drive.period(); t += 2e-12) {
        obs.times.push_back(t);
        obs.power.push_back(1e-3);
    }
    try {
        const FitResult fit = fit_parameters(obs, {500e-6}, 7.7e5, setup, small_options());
        CHECK(std::isfinite(fit.rms_deviation));
    } catch (const InfeasibleFitError&) {
        CHECK(true);
    }
}

TEST_CASE("fit rejects malformed inputs") {
    const FitSetup setup = small_setup();
    ObservedTrace obs;
    for (double t = 0.0; t <= 1.5 * setup.drive.period(); t += 2e-12) {
        obs.times.push_back(t);
        obs.power.push_back(1e-3);
    }
    CHECK_THROWS_AS(fit_parameters(obs, {500e-6}, 7.7e5, setup), ConfigError);
    CHECK_THROWS_AS(fit_parameters(obs, {}, 7.7e5, setup), ConfigError);

    ObservedTrace zero;
    for (double t = 0.0; t <= 2.5 * setup.drive.period(); t += 2e-12) {
        zero.times.push_back(t);
        zero.power.push_back(0.0);
    }
    CHECK_THROWS_AS(fit_parameters(zero, {500e-6}, 7.7e5, setup), ConfigError);
}
