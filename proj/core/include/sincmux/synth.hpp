#pragma once

#include <span>

#include "sincmux/rng.hpp"
#include "sincmux/spectral.hpp"

namespace sincmux {

/// sin(pi x)/(pi x), exactly 1 at x = 0.
double sinc(double x);

/// Periodic summation sum_m sinc(x - m*period) in closed form
/// (Dirichlet kernel; the even-period variant uses the symmetric
/// half-split of the Nyquist line).
double periodic_sinc(double x, std::uint64_t period);

/// input + circular complex gaussian noise of per-sample variance
/// noise_power. noise_power = 0 returns the input bit-for-bit.
Waveform add_awgn(const Waveform& w, double noise_power, RngSeed seed);

/// Random test signal with spectral support inside |f| <= bandwidth/2 minus
/// a one-bin guard, unit RMS. duration*sample_rate must be whole.
Waveform random_bandlimited(double bandwidth_hz, double duration_s, double sample_rate,
                            RngSeed seed, bool real_valued = true);

enum class SincKernel {
    Periodic,   ///< sample window treated as one period (circular convention)
    Truncated,  ///< plain sinc summed over the given samples only
};

struct TimedSample {
    double t = 0.0;
    cdouble value;
};

/// Sampling-theorem reconstruction: sum of sample-weighted sinc kernels at
/// rate_hz evaluated on `grid`. Samples must be uniformly spaced at
/// 1/rate_hz. This is the reference oracle against which the spectral
/// reconstruction path is checked; it never goes through the DFT.
Waveform sinc_reconstruct(std::span<const TimedSample> samples, double rate_hz,
                          const Grid& grid, SincKernel kernel = SincKernel::Periodic);

} // namespace sincmux
