#pragma once

#include "sincmux/rng.hpp"
#include "sincmux/spectral.hpp"

namespace sincmux {

/// Linear fiber: chromatic dispersion as quadratic spectral phase plus
/// scalar attenuation. Defaults are standard SMF values at 1550 nm.
struct FiberSpec {
    double length_km = 0.0;
    double dispersion_ps_nm_km = 17.0;
    double attenuation_db_km = 0.2;
    double center_wavelength_nm = 1550.116;

    void validate() const;
};

/// Amplifier with additive noise (ASE equivalent), gain applied first.
struct AmpSpec {
    double gain_db = 0.0;
    double noise_power = 0.0;  ///< per-sample linear variance

    void validate() const;
};

/// Variable optical attenuator including its insertion loss.
struct VoaSpec {
    double attenuation_db = 0.0;
    double insertion_loss_db = 4.0;

    void validate() const;
};

/// Group-velocity dispersion coefficient beta2 in s^2/m for the fiber spec.
double beta2_s2_per_m(const FiberSpec& fiber);

/// Spectral phase exp(-i (beta2/2) (2 pi f)^2 L) plus field loss
/// 10^(-alpha L / 20). Dispersion alone is unitary.
Waveform propagate_fiber(const Waveform& w, const FiberSpec& fiber);

Waveform apply_voa(const Waveform& w, const VoaSpec& voa);

Waveform amplify(const Waveform& w, const AmpSpec& amp, RngSeed seed);

} // namespace sincmux
