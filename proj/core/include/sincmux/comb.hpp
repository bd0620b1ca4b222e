#pragma once

#include <filesystem>

#include "sincmux/spectral.hpp"

namespace sincmux {

/// One orthogonal sinc-pulse sequence: a flat rectangular comb of n_lines
/// phase-locked lines spanning bandwidth_hz, time-shifted by
/// shift_index * delta_t(). The pulse train has period period() with
/// n_lines - 1 zero crossings between successive peaks.
struct SincSequenceSpec {
    int n_lines = 1;           ///< odd N >= 1
    double bandwidth_hz = 0.0; ///< B
    int shift_index = 0;       ///< l in [0, N)

    double delta_t() const { return 1.0 / bandwidth_hz; }                  ///< peak-to-first-zero
    double period() const { return static_cast<double>(n_lines) / bandwidth_hz; }
    double line_spacing() const { return bandwidth_hz / static_cast<double>(n_lines); }
    int harmonics() const { return (n_lines - 1) / 2; }

    void validate() const;  ///< throws ConfigError on even/nonpositive N, bad B, l out of range
};

struct CombLine {
    double frequency_hz = 0.0;
    cdouble amplitude;
};

struct CombLines {
    std::vector<CombLine> lines;
};

/// Closed cosine-sum evaluation of the sequence at time t. Exactly 1 at
/// peaks (t = shift + m*period), exactly 0 at the interleaved zero slots.
double sequence_value(const SincSequenceSpec& spec, double t);

/// Sequence sampled on a conforming grid. The grid must hold a whole number
/// of sample-aligned periods and satisfy sample_rate >= 2B, so the comb
/// lines land exactly on spectral bins.
Waveform sequence_waveform(const SincSequenceSpec& spec, const Grid& grid);

/// The comb: n_lines lines at k*line_spacing, magnitude 1/N each, phase ramp
/// e^{-i 2 pi f l delta_t} for the time shift.
CombLines comb_lines(const SincSequenceSpec& spec);

void write_comb_csv(const std::filesystem::path& file, const CombLines& comb);

struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // row-major

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Entry (k, l) = value of the shift-l sequence at t = k*delta_t.
/// Orthogonal time interleaving makes this the identity matrix.
SquareMatrix orthogonality_matrix(int n_lines, double bandwidth_hz);

/// Max absolute deviation over the grid of
///   seq(t) * psinc(B t / N) - psinc(B t)
/// with kernels periodized to the grid window (dimensionless, unit peak).
/// The identity holds exactly under the circular convention, so the
/// residual is pure floating-point noise.
double multiplication_theorem_residual(const SincSequenceSpec& spec, const Grid& grid);

// Conforming-grid helpers. delta_t must span a whole number of samples and
// the window a whole number of periods; non-conforming grids are rejected.
Grid sequence_grid(const SincSequenceSpec& spec, int oversampling, std::uint64_t periods,
                   double t0 = 0.0);
int oversampling_of(const SincSequenceSpec& spec, const Grid& grid);      ///< M = fs/B
std::uint64_t periods_of(const SincSequenceSpec& spec, const Grid& grid); ///< P = L/(N M)

} // namespace sincmux
