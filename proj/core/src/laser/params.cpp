#include "pdqrng/laser/params.hpp"

#include "pdqrng/errors.hpp"

#include <cmath>
#include <string>

namespace pdqrng::laser {

double LaserDevice::cavity_decay() const {
    return kSpeedOfLight * (mirror_loss_or_default() + scatter_loss) / effective_index;
}

double LaserDevice::mirror_escape_rate() const {
    return kSpeedOfLight * mirror_loss_or_default() / effective_index;
}

double LaserDevice::power_per_photon_or_default() const {
    if (power_per_photon) {
        return *power_per_photon;
    }
    const double photon_energy = kPlanck * kSpeedOfLight / wavelength;
    return photon_energy * mirror_escape_rate();
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw ConfigError(std::string("LaserParams: ") + what);
    }
}

bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

} // namespace

void LaserParams::validate(bool allow_zero_spont_coupling) const {
    require(std::isfinite(gain_per_carrier) && gain_per_carrier > 0, "gain_per_carrier must be > 0");
    require(carriers_transparency > 0, "carriers_transparency must be > 0");
    require(carriers_threshold > carriers_transparency, "carriers_threshold must exceed carriers_transparency");
    require(photon_saturation > 0, "photon_saturation must be > 0");
    require(carrier_decay > 0, "carrier_decay must be > 0");
    require(cavity_decay > 0, "cavity_decay must be > 0");
    require(spont_coupling > 0 || (allow_zero_spont_coupling && spont_coupling == 0), "spont_coupling must be > 0");
    require(cavity_length > 0 && effective_index > 0, "cavity geometry must be positive");
    require(scatter_loss >= 0 && mirror_loss > 0, "cavity losses must be non-negative");
    require(electron_charge > 0, "electron_charge must be > 0");
    require(power_per_photon > 0, "power_per_photon must be > 0");
    require(close_rel(gain_per_carrier, cavity_decay / (carriers_threshold - carriers_transparency), 1e-9),
            "G_N != gamma / (n_th - n0)");
    require(close_rel(cavity_decay, kSpeedOfLight * (mirror_loss + scatter_loss) / effective_index, 1e-9),
            "gamma != c (alpha_m + alpha_s) / n");
}

LaserParams make_laser_params(const LaserDevice& device, double photon_saturation,
                              double carriers_threshold, double spont_coupling,
                              double gain_per_carrier) {
    LaserParams p;
    p.gain_per_carrier = gain_per_carrier;
    p.carriers_threshold = carriers_threshold;
    p.photon_saturation = photon_saturation;
    p.carrier_decay = device.carrier_decay;
    p.cavity_decay = device.cavity_decay();
    p.carriers_transparency = carriers_threshold - p.cavity_decay / gain_per_carrier;
    p.linewidth_enhancement = device.linewidth_enhancement;
    p.spont_coupling = spont_coupling;
    p.cavity_length = device.cavity_length;
    p.effective_index = device.effective_index;
    p.scatter_loss = device.scatter_loss;
    p.mirror_loss = device.mirror_loss_or_default();
    p.electron_charge = device.electron_charge;
    p.wavelength = device.wavelength;
    p.power_per_photon = device.power_per_photon_or_default();
    return p;
}

LaserDevice reference_device() { return LaserDevice{}; }

LaserParams reference_params() {
    return make_laser_params(reference_device(), 7.7e5, 5.62e7, 8.8e-4, 2.3e4);
}

} // namespace pdqrng::laser
