#include "sincmux/synth.hpp"

#include <algorithm>
#include <cmath>

#include "sincmux/errors.hpp"

namespace sincmux {

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

double periodic_sinc(double x, std::uint64_t period) {
    const double k = static_cast<double>(period);
    // reduce to the principal period; peaks at multiples of `period`
    const double r = x - k * std::round(x / k);
    if (r == 0.0) return 1.0;
    const double u = M_PI * r / k;
    if (period % 2 == 1) return std::sin(M_PI * r) / (k * std::sin(u));
    return std::sin(M_PI * r) / (k * std::tan(u));
}

Waveform add_awgn(const Waveform& w, double noise_power, RngSeed seed) {
    w.validate();
    if (noise_power < 0.0) throw ConfigError("add_awgn: negative noise power");
    if (noise_power == 0.0) return w;

    Waveform out = w;
    RandomStream rng(seed);
    for (auto& s : out.samples) s += rng.complex_gaussian(noise_power);
    return out;
}

Waveform random_bandlimited(double bandwidth_hz, double duration_s, double sample_rate,
                            RngSeed seed, bool real_valued) {
    if (!(sample_rate > 0.0)) throw ConfigError("random_bandlimited: sample_rate must be > 0");
    if (bandwidth_hz < 0.0) throw ConfigError("random_bandlimited: negative bandwidth");
    if (bandwidth_hz >= sample_rate)
        throw ConfigError("random_bandlimited: bandwidth must stay below the sample rate");
    const double n_real = duration_s * sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(n_real));
    if (n < 1 || std::abs(n_real - static_cast<double>(n)) > 1e-6)
        throw ConfigError("random_bandlimited: duration must be a whole number of samples");

    SpectrumView s;
    s.bins.assign(n, cdouble{0.0, 0.0});
    s.bin_spacing = sample_rate / static_cast<double>(n);
    s.sample_rate = sample_rate;
    s.t0 = 0.0;

    // occupy |f| <= bandwidth/2 - one-bin guard, so the band edge stays clear
    const double f_max = bandwidth_hz / 2.0 - s.bin_spacing;
    const std::size_t c = s.center_index();
    RandomStream rng(seed);
    s.bins[c] = cdouble{rng.gaussian(), real_valued ? 0.0 : rng.gaussian()};
    const auto k_signed = static_cast<std::int64_t>(std::floor(f_max / s.bin_spacing + 1e-9));
    const auto k_max = static_cast<std::size_t>(std::max<std::int64_t>(k_signed, 0));
    for (std::size_t k = 1; k <= k_max && c + k < n; k++) {
        if (k > c) break;
        const cdouble pos = rng.complex_gaussian(1.0);
        s.bins[c + k] = pos;
        s.bins[c - k] = real_valued ? std::conj(pos) : rng.complex_gaussian(1.0);
    }

    Waveform w = idft(s);
    if (real_valued)
        for (auto& v : w.samples) v = cdouble{v.real(), 0.0};
    const double rms = std::sqrt(w.power());
    if (rms > 0.0)
        for (auto& v : w.samples) v /= rms;
    return w;
}

Waveform sinc_reconstruct(std::span<const TimedSample> samples, double rate_hz,
                          const Grid& grid, SincKernel kernel) {
    if (!(rate_hz > 0.0)) throw ConfigError("sinc_reconstruct: rate must be > 0");
    if (samples.empty()) throw InputError("sinc_reconstruct: no samples");
    const double dt = 1.0 / rate_hz;
    for (std::size_t k = 1; k < samples.size(); k++) {
        const double gap = samples[k].t - samples[k - 1].t;
        if (std::abs(gap - dt) > 1e-9 * dt)
            throw InputError("sinc_reconstruct: samples not uniformly spaced at 1/rate");
    }

    const std::uint64_t count = samples.size();
    Waveform out = grid.zero();
    const double t_first = samples.front().t;
    for (std::size_t i = 0; i < grid.length; i++) {
        const double u = (grid.time_at(i) - t_first) * rate_hz;  // in sample units
        cdouble acc{0.0, 0.0};
        for (std::size_t k = 0; k < count; k++) {
            const double arg = u - static_cast<double>(k);
            const double kv = (kernel == SincKernel::Periodic) ? periodic_sinc(arg, count)
                                                               : sinc(arg);
            acc += samples[k].value * kv;
        }
        out.samples[i] = acc;
    }
    return out;
}

} // namespace sincmux
