#include "sincmux/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>

#include "sincmux/errors.hpp"

namespace sincmux {

namespace {

// FFTW planning is not thread-safe and unaligned plans are reusable on any
// buffer pair, so plans are created once per (length, direction) and kept.
class PlanCache {
public:
    fftw_plan get(int n, int sign) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(n) << 1) | (sign == FFTW_FORWARD ? 0u : 1u);
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cdouble> scratch_in(static_cast<std::size_t>(n));
        std::vector<cdouble> scratch_out(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
            reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
        if (!plan) throw ConfigError("fftw: could not create plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::unordered_map<std::uint64_t, fftw_plan> plans_;
};

void run_fft(const std::vector<cdouble>& in, std::vector<cdouble>& out, int sign) {
    static PlanCache cache;
    const int n = static_cast<int>(in.size());
    out.resize(in.size());
    fftw_plan plan = cache.get(n, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace

cdouble SpectrumView::line_amplitude(std::size_t i) const {
    return bins[i] / std::sqrt(static_cast<double>(size()));
}

double SpectrumView::energy() const {
    double e = 0.0;
    for (const auto& b : bins) e += std::norm(b);
    return e;
}

SpectrumView dft(const Waveform& w) {
    w.validate();
    const std::size_t n = w.size();

    std::vector<cdouble> natural;
    run_fft(w.samples, natural, FFTW_FORWARD);

    // unitary scaling + center the zero bin at index n/2
    SpectrumView s;
    s.bins.resize(n);
    s.bin_spacing = w.sample_rate / static_cast<double>(n);
    s.sample_rate = w.sample_rate;
    s.t0 = w.t0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const std::size_t c = n / 2;
    for (std::size_t i = 0; i < n; i++) {
        const std::size_t q = (i + n - c) % n;  // natural index of centered bin i
        s.bins[i] = natural[q] * scale;
    }
    return s;
}

Waveform idft(const SpectrumView& s) {
    const std::size_t n = s.size();
    if (n == 0) throw ConfigError("idft: empty spectrum");
    if (!(s.sample_rate > 0.0)) throw ConfigError("idft: sample_rate must be > 0");
    for (const auto& b : s.bins) {
        if (!std::isfinite(b.real()) || !std::isfinite(b.imag()))
            throw InputError("idft: non-finite bin");
    }

    std::vector<cdouble> natural(n);
    const std::size_t c = n / 2;
    for (std::size_t i = 0; i < n; i++) natural[(i + n - c) % n] = s.bins[i];

    Waveform w;
    run_fft(natural, w.samples, FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : w.samples) v *= scale;
    w.sample_rate = s.sample_rate;
    w.t0 = s.t0;
    return w;
}

SpectrumView brickwall_mask(SpectrumView s, double width_hz, double center_hz) {
    if (!(width_hz > 0.0)) throw ConfigError("brickwall: width must be > 0");
    const double nyquist = s.sample_rate / 2.0;
    if (width_hz / 2.0 + std::abs(center_hz) > nyquist * (1.0 + 1e-12))
        throw ConfigError("brickwall: band exceeds representable bandwidth");

    const double half = width_hz / 2.0;
    const double edge_tol = 1e-9 * s.bin_spacing;
    for (std::size_t i = 0; i < s.size(); i++) {
        const double d = std::abs(s.frequency_at(i) - center_hz);
        if (std::abs(d - half) <= edge_tol) {
            s.bins[i] *= 0.5;
        } else if (d > half) {
            s.bins[i] = cdouble{0.0, 0.0};
        }
    }
    return s;
}

Waveform brickwall_filter(const Waveform& w, double width_hz, double center_hz) {
    return idft(brickwall_mask(dft(w), width_hz, center_hz));
}

} // namespace sincmux
