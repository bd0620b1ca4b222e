#include "sincmux/waveform.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "sincmux/errors.hpp"

namespace sincmux {

double Waveform::energy() const {
    double e = 0.0;
    for (const auto& s : samples) e += std::norm(s);
    return e;
}

double Waveform::power() const {
    return samples.empty() ? 0.0 : energy() / static_cast<double>(size());
}

void Waveform::validate() const {
    if (samples.empty()) throw ConfigError("waveform: empty sample buffer");
    if (!(sample_rate > 0.0)) throw ConfigError("waveform: sample_rate must be > 0");
    if (!std::isfinite(t0)) throw InputError("waveform: non-finite t0");
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw InputError("waveform: non-finite sample");
    }
}

Waveform Grid::zero() const {
    Waveform w;
    w.samples.assign(length, cdouble{0.0, 0.0});
    w.sample_rate = sample_rate;
    w.t0 = t0;
    return w;
}

bool same_grid(const Waveform& a, const Waveform& b, double rel_tol) {
    if (a.size() != b.size()) return false;
    const double scale = std::max(std::abs(a.sample_rate), std::abs(b.sample_rate));
    if (std::abs(a.sample_rate - b.sample_rate) > rel_tol * scale) return false;
    return std::abs(a.t0 - b.t0) <= rel_tol * std::max(1.0, std::abs(a.t0));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    for (int i = 0; i < 8; i++) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& os, std::uint64_t u) {
    for (int i = 0; i < 8; i++) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

double get_f64(std::istream& is) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; i++) {
        const int c = is.get();
        if (c == EOF) throw InputError("waveform file: truncated");
        u |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    double v;
    std::memcpy(&v, &u, sizeof v);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; i++) {
        const int c = is.get();
        if (c == EOF) throw InputError("waveform file: truncated");
        u |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return u;
}

} // namespace

void write_waveform(const std::filesystem::path& file, const Waveform& w) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + file.string());
    put_f64(os, w.sample_rate);
    put_f64(os, w.t0);
    put_u64(os, w.size());
    for (const auto& s : w.samples) {
        put_f64(os, s.real());
        put_f64(os, s.imag());
    }
}

Waveform read_waveform(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw InputError("cannot open for reading: " + file.string());
    Waveform w;
    w.sample_rate = get_f64(is);
    w.t0 = get_f64(is);
    const std::uint64_t n = get_u64(is);
    w.samples.resize(n);
    for (auto& s : w.samples) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        s = {re, im};
    }
    return w;
}

void write_waveform_csv(const std::filesystem::path& file, const Waveform& w) {
    std::ofstream os(file);
    if (!os) throw InputError("cannot open for writing: " + file.string());
    os << "t,re,im\n";
    os.precision(17);
    for (std::size_t i = 0; i < w.size(); i++) {
        os << w.time_at(i) << ',' << w.samples[i].real() << ',' << w.samples[i].imag() << '\n';
    }
}

} // namespace sincmux
