#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace sincmux {

using cdouble = std::complex<double>;

/// Uniformly sampled complex baseband signal: the carrier of every stage's
/// output from payload shaping to coherent detection.
struct Waveform {
    std::vector<cdouble> samples;
    double sample_rate = 0.0;  ///< Hz
    double t0 = 0.0;           ///< s, timestamp of samples[0]

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(size()) / sample_rate; }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }

    double energy() const;  ///< sum of |x|^2
    double power() const;   ///< mean of |x|^2

    /// Throws ConfigError on empty/bad rate, InputError on non-finite samples.
    void validate() const;
};

/// Sampling grid without samples; template for synthesis operations.
struct Grid {
    double sample_rate = 0.0;
    std::size_t length = 0;
    double t0 = 0.0;

    double duration() const { return static_cast<double>(length) / sample_rate; }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }

    Waveform zero() const;
    static Grid of(const Waveform& w) { return {w.sample_rate, w.size(), w.t0}; }
};

bool same_grid(const Waveform& a, const Waveform& b, double rel_tol = 1e-12);

// Binary layout: little-endian header {sample_rate f64, t0 f64, length u64},
// body interleaved re/im f64 pairs.
void write_waveform(const std::filesystem::path& file, const Waveform& w);
Waveform read_waveform(const std::filesystem::path& file);

/// Debug dump as "t,re,im" rows.
void write_waveform_csv(const std::filesystem::path& file, const Waveform& w);

} // namespace sincmux
