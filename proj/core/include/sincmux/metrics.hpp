#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "sincmux/waveform.hpp"

namespace sincmux {

enum class EvmNormalization { AvgPower, PeakPower };

/// RMS error-vector magnitude in percent against the nearest constellation
/// point, normalized by the constellation's RMS (AvgPower) or peak
/// (PeakPower) magnitude.
double evm_percent(std::span<const cdouble> received, std::span<const cdouble> constellation,
                   EvmNormalization norm = EvmNormalization::AvgPower);

/// Unit phasor that rotates `received` onto `reference` with maximum
/// correlation; apply as value * phasor.
cdouble alignment_phase(std::span<const cdouble> received, std::span<const cdouble> reference);

/// Least-squares gain/offset fit of received onto reference
/// (one-tap equalizer plus DC block). Returns the corrected values.
std::vector<cdouble> affine_align(std::span<const cdouble> received,
                                  std::span<const cdouble> reference);

struct BerResult {
    double ratio = 0.0;
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
};

BerResult ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits);

/// 2D eye histogram: waveform folded modulo two symbol periods into
/// time_bins x amplitude_bins counts.
struct EyeHistogram {
    std::size_t time_bins = 0;
    std::size_t amplitude_bins = 0;
    double amplitude_min = 0.0;
    double amplitude_max = 0.0;
    double window_s = 0.0;  ///< 2 * symbol period
    std::vector<std::uint64_t> counts;  // row-major [amplitude][time]

    std::uint64_t at(std::size_t a, std::size_t t) const { return counts[a * time_bins + t]; }
    std::uint64_t total() const;
};

EyeHistogram eye_histogram(const Waveform& w, double symbol_period_s,
                           std::size_t time_bins = 64, std::size_t amplitude_bins = 64);

/// Portable greymap raster (P5), darkest = highest count.
void write_eye_pgm(const std::filesystem::path& file, const EyeHistogram& eye);

struct PsdResult {
    std::vector<double> frequency_hz;
    std::vector<double> power_linear;  ///< integrates to the waveform power
    std::vector<double> db_rel_peak;
};

/// Welch-averaged periodogram (Hann window, 50% overlap) at the requested
/// resolution bandwidth.
PsdResult psd(const Waveform& w, double rbw_hz);

void write_psd_csv(const std::filesystem::path& file, const PsdResult& p);

/// Tone power over all remaining in-band power, dB. The tone must sit on a
/// spectral bin; its mirror image is counted as tone for real signals.
double sinad_db(const Waveform& w, double tone_hz);

/// Metrics of one recovered channel as written into reports.
struct MetricsReport {
    std::optional<double> evm_percent;
    std::optional<double> ber_ratio;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_counted = 0;
    std::optional<EyeHistogram> eye;
    std::optional<PsdResult> psd;
    std::optional<double> sinad_db;
    std::optional<double> reconstruction_error;  ///< max interior relative error
};

} // namespace sincmux
