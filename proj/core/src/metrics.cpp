#include "sincmux/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sincmux/errors.hpp"
#include "sincmux/spectral.hpp"

namespace sincmux {

namespace {

cdouble nearest_point(cdouble v, std::span<const cdouble> constellation) {
    cdouble best = constellation[0];
    double best_d = std::norm(v - best);
    for (const auto& c : constellation.subspan(1)) {
        const double d = std::norm(v - c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace

double evm_percent(std::span<const cdouble> received, std::span<const cdouble> constellation,
                   EvmNormalization norm) {
    if (received.empty()) throw InputError("evm: no symbols");
    if (constellation.empty()) throw InputError("evm: empty constellation");

    double err = 0.0;
    for (const auto& v : received) err += std::norm(v - nearest_point(v, constellation));
    err = std::sqrt(err / static_cast<double>(received.size()));

    double ref = 0.0;
    if (norm == EvmNormalization::AvgPower) {
        for (const auto& c : constellation) ref += std::norm(c);
        ref = std::sqrt(ref / static_cast<double>(constellation.size()));
    } else {
        for (const auto& c : constellation) ref = std::max(ref, std::abs(c));
    }
    if (ref <= 0.0) throw ConfigError("evm: constellation has zero reference magnitude");
    return 100.0 * err / ref;
}

cdouble alignment_phase(std::span<const cdouble> received, std::span<const cdouble> reference) {
    if (received.size() != reference.size() || received.empty())
        throw InputError("alignment_phase: size mismatch");
    cdouble corr{0.0, 0.0};
    for (std::size_t i = 0; i < received.size(); i++)
        corr += std::conj(received[i]) * reference[i];
    const double mag = std::abs(corr);
    return mag > 0.0 ? corr / mag : cdouble{1.0, 0.0};
}

std::vector<cdouble> affine_align(std::span<const cdouble> received,
                                  std::span<const cdouble> reference) {
    if (received.size() != reference.size() || received.empty())
        throw InputError("affine_align: size mismatch");
    // least squares for reference ~ g*received + o
    const auto n = static_cast<double>(received.size());
    cdouble sum_r{0, 0}, sum_f{0, 0}, sum_rf{0, 0};
    double sum_rr = 0.0;
    for (std::size_t i = 0; i < received.size(); i++) {
        sum_r += received[i];
        sum_f += reference[i];
        sum_rf += std::conj(received[i]) * reference[i];
        sum_rr += std::norm(received[i]);
    }
    const double denom = sum_rr - std::norm(sum_r) / n;
    if (denom <= 1e-300) {
        // constant input: only the offset is identifiable
        std::vector<cdouble> out(received.size(), sum_f / n);
        return out;
    }
    const cdouble gain = (sum_rf - std::conj(sum_r) * sum_f / n) / denom;
    const cdouble offset = (sum_f - gain * sum_r) / n;
    std::vector<cdouble> out(received.size());
    for (std::size_t i = 0; i < received.size(); i++) out[i] = gain * received[i] + offset;
    return out;
}

BerResult ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits) {
    if (tx_bits.size() != rx_bits.size())
        throw InputError("ber: bit streams differ in length");
    BerResult r;
    r.bits = tx_bits.size();
    for (std::size_t i = 0; i < tx_bits.size(); i++)
        if ((tx_bits[i] != 0) != (rx_bits[i] != 0)) r.errors++;
    r.ratio = r.bits ? static_cast<double>(r.errors) / static_cast<double>(r.bits) : 0.0;
    return r;
}

std::uint64_t EyeHistogram::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

EyeHistogram eye_histogram(const Waveform& w, double symbol_period_s, std::size_t time_bins,
                           std::size_t amplitude_bins) {
    w.validate();
    if (time_bins == 0 || amplitude_bins == 0)
        throw ConfigError("eye: bin counts must be positive");
    const double per_real = symbol_period_s * w.sample_rate;
    const auto per = static_cast<std::uint64_t>(std::llround(per_real));
    if (per < 1 || std::abs(per_real - static_cast<double>(per)) > 1e-9)
        throw ConfigError("eye: symbol period must be a whole number of samples");

    EyeHistogram eye;
    eye.time_bins = time_bins;
    eye.amplitude_bins = amplitude_bins;
    eye.window_s = 2.0 * symbol_period_s;
    eye.counts.assign(time_bins * amplitude_bins, 0);

    double lo = w.samples[0].real(), hi = lo;
    for (const auto& s : w.samples) {
        lo = std::min(lo, s.real());
        hi = std::max(hi, s.real());
    }
    if (hi <= lo) hi = lo + 1.0;
    eye.amplitude_min = lo;
    eye.amplitude_max = hi;

    const std::uint64_t fold = 2 * per;
    for (std::size_t i = 0; i < w.size(); i++) {
        const std::uint64_t phase = i % fold;
        const auto t_bin = static_cast<std::size_t>(phase * time_bins / fold);
        const double a = (w.samples[i].real() - lo) / (hi - lo);
        auto a_bin = static_cast<std::size_t>(a * static_cast<double>(amplitude_bins));
        if (a_bin >= amplitude_bins) a_bin = amplitude_bins - 1;
        eye.counts[a_bin * time_bins + t_bin]++;
    }
    return eye;
}

void write_eye_pgm(const std::filesystem::path& file, const EyeHistogram& eye) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + file.string());
    std::uint64_t peak = 1;
    for (auto c : eye.counts) peak = std::max(peak, c);
    os << "P5\n" << eye.time_bins << ' ' << eye.amplitude_bins << "\n255\n";
    // top row = highest amplitude
    for (std::size_t a = eye.amplitude_bins; a-- > 0;) {
        for (std::size_t t = 0; t < eye.time_bins; t++) {
            const double shade = static_cast<double>(eye.at(a, t)) / static_cast<double>(peak);
            os.put(static_cast<char>(255 - static_cast<int>(std::lround(shade * 255.0))));
        }
    }
}

PsdResult psd(const Waveform& w, double rbw_hz) {
    w.validate();
    const double native_rbw = w.sample_rate / static_cast<double>(w.size());
    if (rbw_hz < native_rbw)
        throw ConfigError("psd: resolution bandwidth below the native bin spacing");

    auto seg_len = static_cast<std::size_t>(std::llround(w.sample_rate / rbw_hz));
    seg_len = std::clamp<std::size_t>(seg_len, 8, w.size());

    // Hann window, 50% overlap
    std::vector<double> window(seg_len);
    double window_power = 0.0;
    for (std::size_t i = 0; i < seg_len; i++) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                         static_cast<double>(seg_len));
        window_power += window[i] * window[i];
    }

    std::vector<double> accum(seg_len, 0.0);
    std::size_t n_segments = 0;
    const std::size_t hop = std::max<std::size_t>(seg_len / 2, 1);
    for (std::size_t start = 0; start + seg_len <= w.size(); start += hop) {
        Waveform seg;
        seg.sample_rate = w.sample_rate;
        seg.t0 = 0.0;
        seg.samples.resize(seg_len);
        for (std::size_t i = 0; i < seg_len; i++)
            seg.samples[i] = w.samples[start + i] * window[i];
        SpectrumView s = dft(seg);
        for (std::size_t i = 0; i < seg_len; i++) accum[i] += std::norm(s.bins[i]);
        n_segments++;
        if (seg_len == w.size()) break;
    }

    PsdResult out;
    out.frequency_hz.resize(seg_len);
    out.power_linear.resize(seg_len);
    out.db_rel_peak.resize(seg_len);
    const double bin_spacing = w.sample_rate / static_cast<double>(seg_len);
    const std::size_t c = seg_len / 2;
    // unitary dft of the windowed segment: sum |bins|^2 = sum |x w|^2;
    // dividing by the window power makes the bins integrate to mean power
    const double norm = 1.0 / (static_cast<double>(n_segments) * window_power);
    double peak = 0.0;
    for (std::size_t i = 0; i < seg_len; i++) {
        out.frequency_hz[i] = (static_cast<double>(i) - static_cast<double>(c)) * bin_spacing;
        out.power_linear[i] = accum[i] * norm;
        peak = std::max(peak, out.power_linear[i]);
    }
    if (peak <= 0.0) peak = 1.0;
    for (std::size_t i = 0; i < seg_len; i++) {
        const double rel = out.power_linear[i] / peak;
        out.db_rel_peak[i] = 10.0 * std::log10(std::max(rel, 1e-30));
    }
    return out;
}

void write_psd_csv(const std::filesystem::path& file, const PsdResult& p) {
    std::ofstream os(file);
    if (!os) throw InputError("cannot open for writing: " + file.string());
    os << "freq_hz,power,db_rel_peak\n";
    os.precision(12);
    for (std::size_t i = 0; i < p.frequency_hz.size(); i++)
        os << p.frequency_hz[i] << ',' << p.power_linear[i] << ',' << p.db_rel_peak[i] << '\n';
}

double sinad_db(const Waveform& w, double tone_hz) {
    w.validate();
    SpectrumView s = dft(w);
    const double idx_real = tone_hz / s.bin_spacing;
    const auto k = static_cast<std::int64_t>(std::llround(idx_real));
    if (std::abs(idx_real - static_cast<double>(k)) > 1e-6)
        throw ConfigError("sinad: tone must sit on a spectral bin");

    const auto c = static_cast<std::int64_t>(s.center_index());
    const auto n = static_cast<std::int64_t>(s.size());
    const std::int64_t pos = c + k;
    const std::int64_t neg = c - k;
    if (pos < 0 || pos >= n) throw ConfigError("sinad: tone outside the represented band");

    double tone = 0.0, rest = 0.0;
    for (std::int64_t i = 0; i < n; i++) {
        const double p = std::norm(s.bins[static_cast<std::size_t>(i)]);
        if (i == pos || i == neg)
            tone += p;
        else
            rest += p;
    }
    if (tone <= 0.0) return -300.0;
    if (rest <= 0.0) rest = tone * 1e-30;
    return 10.0 * std::log10(tone / rest);
}

} // namespace sincmux
