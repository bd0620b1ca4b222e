#pragma once

#include "sincmux/waveform.hpp"

namespace sincmux {

/// Spectrum of a waveform with bins ordered symmetrically around 0 Hz:
/// bins[i] belongs to frequency (i - center_index()) * bin_spacing.
/// The transform is unitary, so waveform and spectrum carry equal energy.
struct SpectrumView {
    std::vector<cdouble> bins;
    double bin_spacing = 0.0;  ///< Hz
    double sample_rate = 0.0;  ///< carried for exact inversion
    double t0 = 0.0;

    std::size_t size() const { return bins.size(); }
    std::size_t center_index() const { return size() / 2; }
    double frequency_at(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(center_index())) * bin_spacing;
    }

    /// Amplitude of the e^{i 2 pi f t} component: a pure tone of amplitude A
    /// on a grid frequency reports |line_amplitude| == A.
    cdouble line_amplitude(std::size_t i) const;

    double energy() const;  ///< sum of |bin|^2
};

SpectrumView dft(const Waveform& w);
Waveform idft(const SpectrumView& s);

/// Zeroes bins strictly outside |f - center| < width/2, half-weights bins
/// landing exactly on the edge, passes the rest untouched. Idempotent on
/// spectra whose edge bins are unoccupied.
SpectrumView brickwall_mask(SpectrumView s, double width_hz, double center_hz = 0.0);

/// dft -> brickwall_mask -> idft.
Waveform brickwall_filter(const Waveform& w, double width_hz, double center_hz = 0.0);

} // namespace sincmux
