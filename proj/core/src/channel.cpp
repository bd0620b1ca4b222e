#include "sincmux/channel.hpp"

#include <cmath>

#include "sincmux/errors.hpp"
#include "sincmux/synth.hpp"

namespace sincmux {

namespace {
constexpr double kSpeedOfLight = 299792458.0;  // m/s
}

void FiberSpec::validate() const {
    if (length_km < 0.0) throw ConfigError("fiber: negative length");
    if (attenuation_db_km < 0.0) throw ConfigError("fiber: negative attenuation");
    if (!(center_wavelength_nm > 0.0)) throw ConfigError("fiber: bad center wavelength");
}

void AmpSpec::validate() const {
    if (noise_power < 0.0) throw ConfigError("amplifier: negative noise power");
}

void VoaSpec::validate() const {
    if (attenuation_db < 0.0 || insertion_loss_db < 0.0)
        throw ConfigError("voa: attenuation and insertion loss must be >= 0");
}

double beta2_s2_per_m(const FiberSpec& fiber) {
    const double d_si = fiber.dispersion_ps_nm_km * 1e-6;      // s/m^2
    const double lambda_m = fiber.center_wavelength_nm * 1e-9;
    return -d_si * lambda_m * lambda_m / (2.0 * M_PI * kSpeedOfLight);
}

Waveform propagate_fiber(const Waveform& w, const FiberSpec& fiber) {
    fiber.validate();
    w.validate();
    if (fiber.length_km == 0.0) return w;

    const double length_m = fiber.length_km * 1e3;
    const double beta2 = beta2_s2_per_m(fiber);
    const double field_loss = std::pow(10.0, -fiber.attenuation_db_km * fiber.length_km / 20.0);

    if (beta2 == 0.0) {
        Waveform out = w;
        if (field_loss != 1.0)
            for (auto& s : out.samples) s *= field_loss;
        return out;
    }

    SpectrumView s = dft(w);
    for (std::size_t i = 0; i < s.size(); i++) {
        const double omega = 2.0 * M_PI * s.frequency_at(i);
        const double phase = -(beta2 / 2.0) * omega * omega * length_m;
        s.bins[i] *= std::polar(field_loss, phase);
    }
    return idft(s);
}

Waveform apply_voa(const Waveform& w, const VoaSpec& voa) {
    voa.validate();
    const double total_db = voa.attenuation_db + voa.insertion_loss_db;
    if (total_db == 0.0) return w;
    const double field = std::pow(10.0, -total_db / 20.0);
    Waveform out = w;
    for (auto& s : out.samples) s *= field;
    return out;
}

Waveform amplify(const Waveform& w, const AmpSpec& amp, RngSeed seed) {
    amp.validate();
    Waveform out = w;
    if (amp.gain_db != 0.0) {
        const double field = std::pow(10.0, amp.gain_db / 20.0);
        for (auto& s : out.samples) s *= field;
    }
    if (amp.noise_power > 0.0) out = add_awgn(out, amp.noise_power, seed);
    return out;
}

} // namespace sincmux
