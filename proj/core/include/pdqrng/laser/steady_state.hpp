#pragma once

#include "pdqrng/laser/params.hpp"

namespace pdqrng::laser {

/// Continuous-wave operating point slightly above threshold.
struct SteadyState {
    double current = 0;            // I_th', A
    double photons = 0;            // s_th'
    double measured_power = 0;     // W
    double carriers_threshold = 0; // n_th
    double spont_coupling = 0;     // R0
};

/// Inputs of the near-threshold solve that are known before fitting.
struct SteadyStateInputs {
    double photon_saturation = 0; // s_sat
    double cavity_decay = 0;      // gamma, 1/s
    double carrier_decay = 0;     // gamma_e, 1/s
    double power_per_photon = 0;  // W
    double electron_charge = kElectronCharge;
};

SteadyStateInputs steady_state_inputs(const LaserDevice& device, double photon_saturation);

/// Solves the stationary photon and carrier equations with n = n_th for
/// (n_th, R0), given the CW current and the measured output power.
///
/// With the photon number fixed by the power, the carrier equation gives n_th
/// directly and the photon equation then gives R0. Throws NoSolutionError
/// (reporting the admissible photon-number bracket) when the current cannot
/// sustain the measured power.
SteadyState steady_state_near_threshold(double current, double measured_power,
                                        const SteadyStateInputs& inputs);

/// Relative residuals of the two stationary equations at `ss`, each scaled
/// by the largest term of its equation.
struct SteadyStateResiduals {
    double photon = 0;
    double carrier = 0;
};
SteadyStateResiduals steady_state_residuals(const SteadyState& ss, const SteadyStateInputs& inputs);

/// Forward problem: the fixed point of the rate equations for a constant
/// current, found by bracketed root finding on [0, I / (q gamma)]. Requires R0 > 0.
double steady_state_photons(double current, const LaserParams& params);

} // namespace pdqrng::laser
