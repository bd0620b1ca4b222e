#include "sincmux/rxchain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "sincmux/errors.hpp"
#include "sincmux/synth.hpp"

namespace sincmux {

void RxConfig::validate(int n_channels) const {
    if (target_shift < 0 || target_shift >= n_channels)
        throw ConfigError("rx: target shift out of [0, N)");
}

Waveform coherent_detect(const Waveform& w, double lo_phase_error) {
    w.validate();
    if (lo_phase_error == 0.0) return w;
    const cdouble rot = std::polar(1.0, -lo_phase_error);
    Waveform out = w;
    for (auto& s : out.samples) s *= rot;
    return out;
}

Waveform demultiplex(const Waveform& s, const SincSequenceSpec& spec, const RxConfig& cfg) {
    spec.validate();
    cfg.validate(spec.n_lines);
    s.validate();
    oversampling_of(spec, Grid::of(s));
    periods_of(spec, Grid::of(s));

    SincSequenceSpec local = spec;
    local.shift_index = cfg.target_shift;

    // local sequence, including receiver clock offset as a fraction of delta_t
    Waveform product = s;
    if (cfg.clock_phase_error == 0.0) {
        const Waveform seq = sequence_waveform(local, Grid::of(s));
        for (std::size_t i = 0; i < product.size(); i++)
            product.samples[i] *= seq.samples[i].real();
    } else {
        const double offset = cfg.clock_phase_error * local.delta_t();
        for (std::size_t i = 0; i < product.size(); i++)
            product.samples[i] *= sequence_value(local, product.time_at(i) - offset);
    }

    const double band = spec.line_spacing();  // B/N
    if (cfg.filter_domain == FilterDomain::LowpassBaseband) {
        return brickwall_filter(coherent_detect(product, cfg.lo_phase_error), band, 0.0);
    }
    // band-pass around the carrier first, then detect
    return coherent_detect(brickwall_filter(product, band, 0.0), cfg.lo_phase_error);
}

DemuxResult extract_samples(const Waveform& x, const SincSequenceSpec& spec, const RxConfig& cfg,
                            std::uint64_t edge_exclude_periods) {
    spec.validate();
    cfg.validate(spec.n_lines);
    const Grid grid = Grid::of(x);
    const int m = oversampling_of(spec, grid);
    const std::uint64_t periods = periods_of(spec, grid);
    if (2 * edge_exclude_periods >= periods)
        throw ConfigError("extract_samples: edge exclusion swallows the whole window");

    DemuxResult res;
    res.filtered = x;
    const std::uint64_t stride = static_cast<std::uint64_t>(spec.n_lines) * static_cast<std::uint64_t>(m);
    const std::uint64_t offset = static_cast<std::uint64_t>(cfg.target_shift) * static_cast<std::uint64_t>(m);
    const double gain = cfg.rescale_by_n ? static_cast<double>(spec.n_lines) : 1.0;

    const std::uint64_t m_first = edge_exclude_periods;
    const std::uint64_t m_last = periods - edge_exclude_periods;  // exclusive
    res.instant_index.reserve(m_last - m_first);
    for (std::uint64_t k = m_first; k < m_last; k++) {
        const std::uint64_t idx = offset + k * stride;
        res.instant_index.push_back(static_cast<std::int64_t>(k));
        res.sample_instants.push_back(x.time_at(idx));
        res.sample_values.push_back(x.samples[idx] * gain);
    }
    return res;
}

Waveform reconstruct_channel(const DemuxResult& res, const SincSequenceSpec& spec,
                             const Grid& grid) {
    if (res.sample_values.empty()) throw InputError("reconstruct_channel: no samples");
    const double rate = 1.0 / (spec.n_lines * spec.delta_t());  // per-channel rate B/N
    std::vector<TimedSample> samples(res.sample_values.size());
    for (std::size_t i = 0; i < samples.size(); i++)
        samples[i] = {res.sample_instants[i], res.sample_values[i]};
    return sinc_reconstruct(samples, rate, grid, SincKernel::Periodic);
}

// ---------------------------------------------------------------------------
// Symbol decisions

namespace {

const std::vector<double>& decision_levels(PayloadKind kind) {
    static const std::vector<double> ook{0.0, 1.0};
    static const std::vector<double> bpsk{-1.0, 1.0};
    static const std::vector<double> four{-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    static const std::vector<double> none{};
    switch (kind) {
        case PayloadKind::Ook: return ook;
        case PayloadKind::Bpsk: return bpsk;
        case PayloadKind::FourLevelBpsk: return four;
        case PayloadKind::Analog: return none;
    }
    return none;
}

// bits per decided level; Gray order for the 4-level constellation
void append_bits(std::vector<std::uint8_t>& bits, PayloadKind kind, std::size_t level_index) {
    switch (kind) {
        case PayloadKind::Ook:
        case PayloadKind::Bpsk:
            bits.push_back(static_cast<std::uint8_t>(level_index));
            break;
        case PayloadKind::FourLevelBpsk: {
            static constexpr std::uint8_t gray[4][2] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
            bits.push_back(gray[level_index][0]);
            bits.push_back(gray[level_index][1]);
            break;
        }
        case PayloadKind::Analog:
            break;
    }
}

std::size_t nearest_level(double v, const std::vector<double>& levels) {
    std::size_t best = 0;
    double best_d = std::abs(v - levels[0]);
    for (std::size_t i = 1; i < levels.size(); i++) {
        const double d = std::abs(v - levels[i]);
        if (d < best_d) {  // strict: ties stay at the lower level
            best_d = d;
            best = i;
        }
    }
    return best;
}

} // namespace

DecisionResult decide_symbols(const std::vector<cdouble>& values, PayloadKind kind) {
    if (kind == PayloadKind::Analog)
        throw ConfigError("decide_symbols: analog channels carry no symbols");
    if (values.empty()) throw InputError("decide_symbols: no symbol values");

    DecisionResult out;
    out.levels.reserve(values.size());
    const auto& levels = decision_levels(kind);

    if (kind == PayloadKind::Ook) {
        // intensity decision: |v|^2 against the midpoint of the rail means
        std::vector<double> power(values.size());
        for (std::size_t i = 0; i < values.size(); i++) power[i] = std::norm(values[i]);
        std::vector<double> sorted = power;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        double lo = 0.0, hi = 0.0;
        std::size_t n_lo = 0, n_hi = 0;
        for (double p : power) {
            if (p < median) {
                lo += p;
                n_lo++;
            } else {
                hi += p;
                n_hi++;
            }
        }
        const double rail_lo = n_lo ? lo / static_cast<double>(n_lo) : 0.0;
        const double rail_hi = n_hi ? hi / static_cast<double>(n_hi) : 1.0;
        const double threshold = (rail_lo + rail_hi) / 2.0;
        for (double p : power) {
            const std::size_t idx = (p > threshold) ? 1 : 0;  // tie -> lower level
            out.levels.push_back(levels[idx]);
            append_bits(out.bits, kind, idx);
        }
        return out;
    }

    for (const auto& v : values) {
        const std::size_t idx = nearest_level(v.real(), levels);
        out.levels.push_back(levels[idx]);
        append_bits(out.bits, kind, idx);
    }
    return out;
}

std::vector<std::uint8_t> symbols_to_bits(const std::vector<double>& levels, PayloadKind kind) {
    const auto& set = decision_levels(kind);
    std::vector<std::uint8_t> bits;
    bits.reserve(levels.size() * (kind == PayloadKind::FourLevelBpsk ? 2 : 1));
    for (double v : levels) {
        const std::size_t idx = nearest_level(v, set);
        append_bits(bits, kind, idx);
    }
    return bits;
}

void write_demux_csv(const std::filesystem::path& file, const DemuxResult& res) {
    std::ofstream os(file);
    if (!os) throw InputError("cannot open for writing: " + file.string());
    os << "m,t_s,re,im\n";
    os.precision(17);
    for (std::size_t i = 0; i < res.sample_values.size(); i++)
        os << res.instant_index[i] << ',' << res.sample_instants[i] << ','
           << res.sample_values[i].real() << ',' << res.sample_values[i].imag() << '\n';
}

} // namespace sincmux
