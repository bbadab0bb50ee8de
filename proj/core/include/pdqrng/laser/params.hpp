#pragma once

#include <optional>

namespace pdqrng::laser {

inline constexpr double kSpeedOfLight = 2.99792458e8;      // m/s
inline constexpr double kElectronCharge = 1.602176634e-19; // C
inline constexpr double kPlanck = 6.62607015e-34;          // J s

/// Cavity and material constants that are not fitted.
///
/// Only the product R0 of the spontaneous-emission coupling factors is ever
/// represented; the individual confinement and enhancement factors are not.
struct LaserDevice {
    double cavity_length = 500e-6;          // m
    double effective_index = 4.33;
    double scatter_loss = 4500.0;           // 1/m
    std::optional<double> mirror_loss;      // 1/m; defaults to 1.4 / cavity_length
    double carrier_decay = 1e9;             // 1/s
    double linewidth_enhancement = 5.4;
    double wavelength = 1550e-9;            // m
    double electron_charge = kElectronCharge;
    std::optional<double> power_per_photon; // W; defaults to hbar*omega*c*alpha_m/n

    double mirror_loss_or_default() const { return mirror_loss.value_or(1.4 / cavity_length); }
    /// gamma = c (alpha_m + alpha_s) / n.
    double cavity_decay() const;
    /// Photon escape rate through the mirrors, c alpha_m / n.
    double mirror_escape_rate() const;
    /// Output power carried by one intracavity photon.
    double power_per_photon_or_default() const;
};

/// Rate-equation coefficients.
///
/// Counts (carriers, photons) are dimensionless numbers of particles in the
/// active volume; rates are per second.
struct LaserParams {
    double gain_per_carrier = 0;      // G_N, 1/s per carrier
    double carriers_transparency = 0; // n0
    double carriers_threshold = 0;    // n_th
    double photon_saturation = 0;     // s_sat
    double carrier_decay = 0;         // gamma_e, 1/s
    double cavity_decay = 0;          // gamma, 1/s
    double linewidth_enhancement = 0; // alpha
    double spont_coupling = 0;        // R0
    double cavity_length = 0;         // m
    double effective_index = 0;
    double scatter_loss = 0;          // 1/m
    double mirror_loss = 0;           // 1/m
    double electron_charge = kElectronCharge;
    double wavelength = 0;            // m
    double power_per_photon = 0;      // W per intracavity photon

    /// Throws ConfigError naming the first violated invariant. The integrator
    /// also accepts R0 = 0 (no spontaneous seeding) for limit studies.
    void validate(bool allow_zero_spont_coupling = false) const;

    double output_power(double photons) const noexcept { return power_per_photon * photons; }
    double spontaneous_rate(double carriers) const noexcept {
        return carriers * carrier_decay * spont_coupling;
    }
};

/// Builds a consistent parameter set: gamma follows from the cavity losses and
/// n0 from gamma = G_N (n_th - n0).
LaserParams make_laser_params(const LaserDevice& device, double photon_saturation,
                              double carriers_threshold, double spont_coupling,
                              double gain_per_carrier);

/// Device constants used by the reference configuration (500 um cavity).
LaserDevice reference_device();

/// The fitted reference parameter set: s_sat = 7.7e5, L = 500 um,
/// n_th = 5.62e7, R0 = 8.8e-4, G_N = 2.3e4 (n0 derived, ~3.42e7).
LaserParams reference_params();

} // namespace pdqrng::laser
