#include <doctest.h>

#include <cmath>

#include "sincmux/errors.hpp"
#include "sincmux/rng.hpp"
#include "sincmux/spectral.hpp"

using namespace sincmux;

namespace {

Waveform random_waveform(std::size_t n, std::uint64_t seed, double rate = 1e9) {
    RandomStream rng(RngSeed{seed});
    Waveform w;
    w.sample_rate = rate;
    w.samples.resize(n);
    for (auto& s : w.samples) s = rng.complex_gaussian(1.0);
    return w;
}

Waveform tone(std::size_t n, double rate, double freq, double amp = 1.0) {
    Waveform w;
    w.sample_rate = rate;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; i++)
        w.samples[i] = std::polar(amp, 2.0 * M_PI * freq * static_cast<double>(i) / rate);
    return w;
}

double max_rel_error(const Waveform& a, const Waveform& b) {
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) {
        peak = std::max(peak, std::abs(a.samples[i]));
        err = std::max(err, std::abs(a.samples[i] - b.samples[i]));
    }
    return peak > 0.0 ? err / peak : err;
}

} // namespace

TEST_CASE("constant waveform transforms to a single DC bin") {
    Waveform w;
    w.sample_rate = 8.0;
    w.samples.assign(8, cdouble{1.0, 0.0});
    const SpectrumView s = dft(w);
    REQUIRE(s.size() == 8);
    for (std::size_t i = 0; i < s.size(); i++) {
        if (i == s.center_index()) {
            CHECK(s.frequency_at(i) == doctest::Approx(0.0));
            CHECK(std::abs(s.line_amplitude(i) - cdouble{1.0, 0.0}) < 1e-12);
        } else {
            CHECK(std::abs(s.bins[i]) < 1e-12);
        }
    }
}

TEST_CASE("pure tone occupies exactly its own bin") {
    const double rate = 64.0;
    const std::size_t n = 64;
    const double freq = 5.0;  // bin frequency
    const Waveform w = tone(n, rate, freq, 2.0);
    const SpectrumView s = dft(w);
    for (std::size_t i = 0; i < s.size(); i++) {
        if (std::abs(s.frequency_at(i) - freq) < 1e-9) {
            CHECK(std::abs(s.line_amplitude(i)) == doctest::Approx(2.0).epsilon(1e-12));
        } else {
            CHECK(std::abs(s.line_amplitude(i)) < 1e-12);
        }
    }
}

TEST_CASE("round trip identity at 1e-12 for assorted lengths") {
    for (std::size_t n : {std::size_t{64}, std::size_t{48}, std::size_t{63}, std::size_t{1},
                          std::size_t{2048}}) {
        const Waveform w = random_waveform(n, 1000 + n);
        const Waveform r = idft(dft(w));
        CHECK(max_rel_error(w, r) < 1e-12);
        CHECK(r.sample_rate == w.sample_rate);
    }
}

TEST_CASE("round trip identity at 2^20 samples") {
    const Waveform w = random_waveform(1u << 20, 77);
    const Waveform r = idft(dft(w));
    CHECK(max_rel_error(w, r) < 1e-12);
}

TEST_CASE("Parseval equality") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Waveform w = random_waveform(777, seed);
        const SpectrumView s = dft(w);
        CHECK(s.energy() == doctest::Approx(w.energy()).epsilon(1e-10));
    }
}

TEST_CASE("dft rejects non-finite input") {
    Waveform w = random_waveform(16, 5);
    w.samples[3] = cdouble{std::nan(""), 0.0};
    CHECK_THROWS_AS(dft(w), InputError);
}

TEST_CASE("idft of a single DC bin gives a constant waveform") {
    SpectrumView s;
    s.bins.assign(9, cdouble{0.0, 0.0});
    s.sample_rate = 9.0;
    s.bin_spacing = 1.0;
    s.bins[s.center_index()] = cdouble{1.0, 0.0};
    const Waveform w = idft(s);
    for (const auto& v : w.samples)
        CHECK(std::abs(v - w.samples[0]) < 1e-14);
    CHECK(std::abs(w.samples[0]) > 0.0);
}

TEST_CASE("idft of the zero spectrum is the zero waveform") {
    SpectrumView s;
    s.bins.assign(16, cdouble{0.0, 0.0});
    s.sample_rate = 16.0;
    s.bin_spacing = 1.0;
    const Waveform w = idft(s);
    for (const auto& v : w.samples) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("brickwall passes in-band tones untouched") {
    const Waveform w = tone(128, 128.0, 10.0);
    const Waveform f = brickwall_filter(w, 40.0, 0.0);
    CHECK(max_rel_error(w, f) < 1e-12);
}

TEST_CASE("brickwall rejects out-of-band tones") {
    const Waveform w = tone(128, 128.0, 30.0);
    const Waveform f = brickwall_filter(w, 40.0, 0.0);
    for (const auto& v : f.samples) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("tone exactly on the band edge is halved") {
    const Waveform w = tone(128, 128.0, 20.0);
    const Waveform f = brickwall_filter(w, 40.0, 0.0);  // edge at |f| = 20
    double ratio = std::abs(f.samples[17]) / std::abs(w.samples[17]);
    CHECK(ratio == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("brickwall mask is idempotent off the edge bins") {
    const Waveform w = random_waveform(256, 9, 256.0);
    // width chosen so the edge falls between bins
    const SpectrumView once = brickwall_mask(dft(w), 61.5, 0.0);
    const SpectrumView twice = brickwall_mask(once, 61.5, 0.0);
    for (std::size_t i = 0; i < once.size(); i++) {
        CHECK(once.bins[i].real() == twice.bins[i].real());
        CHECK(once.bins[i].imag() == twice.bins[i].imag());
    }
}

TEST_CASE("band outside the representable range is rejected") {
    const Waveform w = random_waveform(64, 11, 64.0);
    CHECK_THROWS_AS(brickwall_filter(w, 100.0, 0.0), ConfigError);
    CHECK_THROWS_AS(brickwall_filter(w, 30.0, 20.0), ConfigError);
}

TEST_CASE("off-center band keeps only the shifted tone") {
    const Waveform in_band = tone(128, 128.0, 24.0);
    const Waveform out_band = tone(128, 128.0, -24.0);
    const Waveform f_in = brickwall_filter(in_band, 10.0, 24.0);
    const Waveform f_out = brickwall_filter(out_band, 10.0, 24.0);
    CHECK(max_rel_error(in_band, f_in) < 1e-12);
    for (const auto& v : f_out.samples) CHECK(std::abs(v) < 1e-12);
}
