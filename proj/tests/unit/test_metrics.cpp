#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "sincmux/comb.hpp"
#include "sincmux/errors.hpp"
#include "sincmux/metrics.hpp"
#include "sincmux/synth.hpp"
#include "sincmux/txchain.hpp"

using namespace sincmux;

namespace {
const std::vector<cdouble> kBpsk = {cdouble{-1, 0}, cdouble{1, 0}};
}

TEST_CASE("evm of a perfect constellation is zero") {
    std::vector<cdouble> rx = {cdouble{1, 0}, cdouble{-1, 0}, cdouble{1, 0}};
    CHECK(evm_percent(rx, kBpsk) == doctest::Approx(0.0));
}

TEST_CASE("one symbol at 1.1 against bpsk gives 10 percent") {
    std::vector<cdouble> rx = {cdouble{1.1, 0}};
    CHECK(evm_percent(rx, kBpsk, EvmNormalization::AvgPower) == doctest::Approx(10.0));
    CHECK(evm_percent(rx, kBpsk, EvmNormalization::PeakPower) == doctest::Approx(10.0));
}

TEST_CASE("awgn at 20 dB symbol snr gives about 10 percent evm") {
    const std::size_t n = 100000;
    Waveform symbols;
    symbols.sample_rate = 1.0;
    symbols.samples.resize(n);
    RandomStream rng(RngSeed{31});
    for (auto& s : symbols.samples) s = cdouble{(rng.next_u64() & 1) ? 1.0 : -1.0, 0.0};
    const Waveform noisy = add_awgn(symbols, 0.01, RngSeed{32});
    const double evm = evm_percent(noisy.samples, kBpsk);
    CHECK(evm == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("evm is invariant under joint scaling") {
    std::vector<cdouble> rx = {cdouble{0.9, 0.1}, cdouble{-1.05, -0.04}};
    const double base = evm_percent(rx, kBpsk);
    for (double alpha : {0.1, 3.0, 1e6}) {
        std::vector<cdouble> rx_s = rx;
        std::vector<cdouble> ref_s = kBpsk;
        for (auto& v : rx_s) v *= alpha;
        for (auto& v : ref_s) v *= alpha;
        CHECK(evm_percent(rx_s, ref_s) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("evm rejects empty input") {
    std::vector<cdouble> empty;
    CHECK_THROWS_AS(evm_percent(empty, kBpsk), InputError);
}

TEST_CASE("phase alignment recovers a known rotation") {
    std::vector<cdouble> ref(128);
    RandomStream rng(RngSeed{41});
    for (auto& v : ref) v = cdouble{(rng.next_u64() & 1) ? 1.0 : -1.0, 0.0};
    const cdouble rot = std::polar(1.0, 1.1);
    std::vector<cdouble> rx(ref.size());
    for (std::size_t i = 0; i < ref.size(); i++) rx[i] = ref[i] * rot;
    const cdouble back = alignment_phase(rx, ref);
    CHECK(std::abs(back * rot - cdouble{1.0, 0.0}) < 1e-12);
}

TEST_CASE("affine alignment undoes gain and offset exactly") {
    std::vector<cdouble> ref(64);
    RandomStream rng(RngSeed{42});
    for (auto& v : ref) v = rng.complex_gaussian(1.0);
    const cdouble gain{0.3, -0.8};
    const cdouble offset{0.2, 0.05};
    std::vector<cdouble> rx(ref.size());
    for (std::size_t i = 0; i < ref.size(); i++) rx[i] = gain * ref[i] + offset;
    const auto corrected = affine_align(rx, ref);
    for (std::size_t i = 0; i < ref.size(); i++)
        CHECK(std::abs(corrected[i] - ref[i]) < 1e-12);
}

TEST_CASE("ber identities") {
    std::vector<std::uint8_t> bits = {1, 0, 1, 1, 0, 0, 1, 0};
    std::vector<std::uint8_t> complement(bits.size());
    for (std::size_t i = 0; i < bits.size(); i++) complement[i] = bits[i] ^ 1;
    CHECK(ber(bits, bits).ratio == 0.0);
    CHECK(ber(bits, complement).ratio == 1.0);

    std::vector<std::uint8_t> tx(1000, 0), rx(1000, 0);
    rx[17] = rx[256] = rx[999] = 1;
    const auto r = ber(tx, rx);
    CHECK(r.ratio == doctest::Approx(0.003));
    CHECK(r.errors == 3);
    CHECK(r.bits == 1000);

    std::vector<std::uint8_t> longer(1001, 0);
    CHECK_THROWS_AS(ber(tx, longer), InputError);
}

TEST_CASE("constant waveform folds into a single amplitude row") {
    Waveform w;
    w.sample_rate = 64.0;
    w.samples.assign(512, cdouble{0.7, 0.0});
    const auto eye = eye_histogram(w, 8.0 / 64.0, 16, 32);
    CHECK(eye.total() == w.size());
    std::size_t occupied_rows = 0;
    for (std::size_t a = 0; a < eye.amplitude_bins; a++) {
        std::uint64_t row = 0;
        for (std::size_t t = 0; t < eye.time_bins; t++) row += eye.at(a, t);
        if (row > 0) occupied_rows++;
    }
    CHECK(occupied_rows == 1);
}

TEST_CASE("noiseless nrz bpsk eye shows two rails and an open center") {
    // NRZ BPSK, 8 samples per symbol
    Waveform w;
    w.sample_rate = 8.0;
    const auto bits = prbs7(PrbsSpec{0x3c}, 64);
    for (std::uint8_t b : bits)
        for (int i = 0; i < 8; i++) w.samples.push_back(cdouble{b ? 1.0 : -1.0, 0.0});
    const auto eye = eye_histogram(w, 1.0, 16, 8);
    CHECK(eye.total() == w.size());
    // every count sits in the top or bottom amplitude bin
    std::uint64_t rails = 0;
    for (std::size_t t = 0; t < eye.time_bins; t++)
        rails += eye.at(0, t) + eye.at(eye.amplitude_bins - 1, t);
    CHECK(rails == eye.total());
    // mid-amplitude at the eye center is empty
    CHECK(eye.at(eye.amplitude_bins / 2, eye.time_bins / 2) == 0);
}

TEST_CASE("at equal average power the bpsk eye opens wider than the ook eye") {
    // NRZ rails at equal mean power: BPSK {-1,+1}, OOK {0,sqrt(2)}
    const std::size_t sps = 16, n_sym = 256;
    auto build = [&](bool ook, std::uint64_t seed) {
        Waveform w;
        w.sample_rate = static_cast<double>(sps);
        const auto bits = prbs7(PrbsSpec{0x2b}, n_sym);
        for (std::uint8_t b : bits) {
            const double level = ook ? (b ? std::sqrt(2.0) : 0.0) : (b ? 1.0 : -1.0);
            for (std::size_t i = 0; i < sps; i++) w.samples.push_back(cdouble{level, 0.0});
        }
        return add_awgn(w, 0.02, RngSeed{seed});
    };
    // vertical opening: gap between rail clusters at the sampling phase
    auto opening = [&](const Waveform& w) {
        const auto eye = eye_histogram(w, 1.0, 16, 64);
        const std::size_t t_mid = 4;  // mid-symbol column
        const double bin_w = (eye.amplitude_max - eye.amplitude_min) / 64.0;
        std::size_t longest = 0, run = 0;
        for (std::size_t a = 0; a < eye.amplitude_bins; a++) {
            if (eye.at(a, t_mid) == 0)
                run++;
            else {
                longest = std::max(longest, run);
                run = 0;
            }
        }
        longest = std::max(longest, run);
        return static_cast<double>(longest) * bin_w;
    };
    const double bpsk_open = opening(build(false, 5001));
    const double ook_open = opening(build(true, 5002));
    CHECK(bpsk_open >= ook_open);
    CHECK(bpsk_open > 0.0);
}

TEST_CASE("eye rejects off-grid symbol periods") {
    Waveform w;
    w.sample_rate = 10.0;
    w.samples.assign(100, cdouble{0, 0});
    CHECK_THROWS_AS(eye_histogram(w, 0.25, 8, 8), ConfigError);
}

TEST_CASE("eye pgm export") {
    Waveform w;
    w.sample_rate = 8.0;
    w.samples.assign(64, cdouble{0.5, 0.0});
    const auto eye = eye_histogram(w, 1.0, 8, 8);
    const auto file = std::filesystem::temp_directory_path() / "sincmux_eye.pgm";
    write_eye_pgm(file, eye);
    std::ifstream is(file, std::ios::binary);
    std::string magic;
    is >> magic;
    CHECK(magic == "P5");
    std::filesystem::remove(file);
}

TEST_CASE("psd of a pure tone peaks 60 dB over the floor") {
    Waveform w;
    w.sample_rate = 1024.0;
    w.samples.resize(8192);
    for (std::size_t i = 0; i < w.size(); i++)
        w.samples[i] = std::polar(1.0, 2.0 * M_PI * 128.0 * static_cast<double>(i) / 1024.0);
    const PsdResult p = psd(w, 8.0);
    double peak_db = -1e9;
    std::size_t peak_idx = 0;
    for (std::size_t i = 0; i < p.db_rel_peak.size(); i++) {
        if (p.db_rel_peak[i] > peak_db) {
            peak_db = p.db_rel_peak[i];
            peak_idx = i;
        }
    }
    CHECK(p.frequency_hz[peak_idx] == doctest::Approx(128.0).epsilon(0.05));
    // median floor well below the peak
    std::vector<double> sorted = p.db_rel_peak;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[sorted.size() / 2] < -60.0);
}

TEST_CASE("psd integrates back to the waveform power") {
    Waveform w = random_bandlimited(200.0, 8.0, 1024.0, RngSeed{55}, false);
    const PsdResult p = psd(w, 16.0);
    double total = 0.0;
    for (double v : p.power_linear) total += v;
    CHECK(total == doctest::Approx(w.power()).epsilon(0.01));
}

TEST_CASE("psd of the multiplexed signal is a flat-top rectangle") {
    std::vector<SincSequenceSpec> specs = {{3, 24e9, 0}, {3, 24e9, 1}, {3, 24e9, 2}};
    const Grid grid = sequence_grid(specs[0], 16, 128);
    std::vector<Waveform> payloads;
    for (int l = 0; l < 3; l++)
        payloads.push_back(random_bandlimited(7e9, grid.duration(), grid.sample_rate,
                                              RngSeed{56 + static_cast<std::uint64_t>(l)}, true));
    const Waveform s = multiplex(payloads, specs);
    const PsdResult p = psd(s, 250e6);
    // average level inside the +-11 GHz core vs outside 13 GHz
    double inside = 0.0, outside = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < p.frequency_hz.size(); i++) {
        if (std::abs(p.frequency_hz[i]) < 11e9) {
            inside += p.power_linear[i];
            n_in++;
        } else if (std::abs(p.frequency_hz[i]) > 13e9) {
            outside += p.power_linear[i];
            n_out++;
        }
    }
    inside /= static_cast<double>(n_in);
    outside /= static_cast<double>(n_out);
    CHECK(inside / outside > 1e3);
}

TEST_CASE("psd rejects rbw below the native resolution") {
    Waveform w;
    w.sample_rate = 64.0;
    w.samples.assign(64, cdouble{1, 0});
    CHECK_THROWS_AS(psd(w, 0.5), ConfigError);
}

TEST_CASE("sinad of a pure tone hits the numerical floor") {
    Waveform w;
    w.sample_rate = 4096.0;
    w.samples.resize(4096);
    for (std::size_t i = 0; i < w.size(); i++)
        w.samples[i] = cdouble{std::cos(2.0 * M_PI * 512.0 * static_cast<double>(i) / 4096.0), 0.0};
    CHECK(sinad_db(w, 512.0) >= 120.0);
}

TEST_CASE("tone plus equal-power in-band noise sits near 0 dB") {
    const std::size_t n = 1u << 16;
    Waveform w;
    w.sample_rate = static_cast<double>(n);
    w.samples.resize(n);
    const double amp = std::sqrt(2.0);  // tone power 1
    for (std::size_t i = 0; i < n; i++)
        w.samples[i] = cdouble{amp * std::cos(2.0 * M_PI * 1000.0 * static_cast<double>(i) /
                                              static_cast<double>(n)),
                               0.0};
    const Waveform noisy = add_awgn(w, 1.0, RngSeed{77});
    CHECK(std::abs(sinad_db(noisy, 1000.0)) < 0.5);
}

TEST_CASE("sinad rejects off-grid tones") {
    Waveform w;
    w.sample_rate = 64.0;
    w.samples.assign(64, cdouble{1, 0});
    CHECK_THROWS_AS(sinad_db(w, 1.5), ConfigError);
}
