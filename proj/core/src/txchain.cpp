#include "sincmux/txchain.hpp"

#include <algorithm>
#include <cmath>

#include "sincmux/errors.hpp"

namespace sincmux {

namespace {

const std::vector<double>& level_set(PayloadKind kind) {
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

bool is_member(double v, const std::vector<double>& set) {
    for (double s : set)
        if (std::abs(v - s) <= 1e-12) return true;
    return false;
}

} // namespace

void ChannelPayload::validate() const {
    if (kind == PayloadKind::Analog) {
        analog_waveform.validate();
        return;
    }
    if (!(symbol_rate > 0.0)) throw ConfigError("payload: symbol_rate must be > 0");
    if (symbols.empty()) throw ConfigError("payload: no symbols");
    const auto& levels = level_set(kind);
    for (double s : symbols)
        if (!is_member(s, levels)) throw InputError("payload: symbol outside the level set");
}

void PrbsSpec::validate() const {
    if ((seed & 0x7f) == 0) throw ConfigError("prbs7: zero seed locks the register");
}

Prbs7Stream::Prbs7Stream(PrbsSpec spec) : state_(spec.seed & 0x7f) { spec.validate(); }

std::uint8_t Prbs7Stream::next_bit() {
    // x^7 + x^6 + 1, maximal length 127
    const std::uint8_t bit = static_cast<std::uint8_t>(((state_ >> 6) ^ (state_ >> 5)) & 1u);
    state_ = static_cast<std::uint8_t>(((state_ << 1) | bit) & 0x7f);
    return bit;
}

std::vector<std::uint8_t> prbs7(const PrbsSpec& spec, std::size_t n_bits) {
    Prbs7Stream stream(spec);
    std::vector<std::uint8_t> bits(n_bits);
    for (auto& b : bits) b = stream.next_bit();
    return bits;
}

void MzmModel::validate() const {
    if (!(v_pi > 0.0)) throw ConfigError("mzm: v_pi must be > 0");
}

double TxPlan::channel_phase(int l) const {
    return 2.0 * M_PI * static_cast<double>(l) / static_cast<double>(n_channels);
}

SincSequenceSpec TxPlan::sequence_spec(int l) const {
    return SincSequenceSpec{n_channels, sequence_bandwidth_hz(), l};
}

void TxPlan::validate() const {
    if (n_channels < 1 || n_channels % 2 == 0)
        throw ConfigError("tx plan: channel count must be odd");
    if (!(line_spacing_hz > 0.0)) throw ConfigError("tx plan: line spacing must be > 0");
}

// ---------------------------------------------------------------------------
// Payload shaping

namespace {

// Band-exact shaping: the symbol sequence is treated as samples at the
// symbol rate and interpolated onto the grid through its spectrum.
Waveform shape_brickwall(const std::vector<double>& symbols, double symbol_rate,
                         const Grid& grid) {
    const std::size_t n_sym = symbols.size();
    Waveform at_rate;
    at_rate.samples.reserve(n_sym);
    for (double s : symbols) at_rate.samples.emplace_back(s, 0.0);
    at_rate.sample_rate = symbol_rate;
    at_rate.t0 = grid.t0;

    SpectrumView small = dft(at_rate);

    SpectrumView big;
    big.bins.assign(grid.length, cdouble{0.0, 0.0});
    big.sample_rate = grid.sample_rate;
    big.bin_spacing = grid.sample_rate / static_cast<double>(grid.length);
    big.t0 = grid.t0;

    // bin spacings match (window durations are equal); copy line amplitudes
    const double ratio = small.bin_spacing / big.bin_spacing;
    if (std::abs(ratio - 1.0) > 1e-9)
        throw ConfigError("shape_payload: symbol count does not fill the window");

    const std::size_t cs = small.center_index();
    const std::size_t cb = big.center_index();
    const double scale = std::sqrt(static_cast<double>(grid.length) / static_cast<double>(n_sym));
    const std::size_t half = n_sym / 2;
    for (std::size_t i = 0; i < n_sym; i++) {
        const auto k = static_cast<std::int64_t>(i) - static_cast<std::int64_t>(cs);
        cdouble amp = small.bins[i] * scale;
        // the Nyquist line of an even-length symbol grid splits symmetrically
        if (n_sym % 2 == 0 && i == 0) {
            big.bins[cb - half] += amp * 0.5;
            big.bins[cb + half] += std::conj(amp) * 0.5;
            continue;
        }
        big.bins[static_cast<std::size_t>(static_cast<std::int64_t>(cb) + k)] = amp;
    }
    Waveform out = idft(big);
    for (auto& v : out.samples) v = cdouble{v.real(), 0.0};
    return out;
}

Waveform shape_nrz(const std::vector<double>& symbols, double symbol_rate, const Grid& grid) {
    const double sps_real = grid.sample_rate / symbol_rate;
    const auto sps = static_cast<std::size_t>(std::llround(sps_real));
    if (sps < 1 || std::abs(sps_real - static_cast<double>(sps)) > 1e-9)
        throw ConfigError("shape_payload: symbol period must be a whole number of samples");
    Waveform out = grid.zero();
    for (std::size_t i = 0; i < grid.length; i++) {
        const std::size_t k = (i / sps) % symbols.size();
        out.samples[i] = cdouble{symbols[k], 0.0};
    }
    return out;
}

double out_of_band_fraction(const Waveform& w, double limit_hz) {
    SpectrumView s = dft(w);
    double inside = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < s.size(); i++) {
        const double p = std::norm(s.bins[i]);
        if (std::abs(s.frequency_at(i)) <= limit_hz + 1e-9 * s.bin_spacing)
            inside += p;
        else
            outside += p;
    }
    const double total = inside + outside;
    return total > 0.0 ? outside / total : 0.0;
}

} // namespace

Waveform shape_payload(const ChannelPayload& payload, const Grid& grid, PulseShaping shaping,
                       NyquistStrictness strictness) {
    payload.validate();

    Waveform shaped;
    if (payload.kind == PayloadKind::Analog) {
        const auto& w = payload.analog_waveform;
        if (w.size() != grid.length ||
            std::abs(w.sample_rate - grid.sample_rate) > 1e-9 * grid.sample_rate)
            throw ConfigError("shape_payload: analog waveform does not match the link grid");
        shaped = w;
        shaped.t0 = grid.t0;
    } else {
        const double n_sym_real = grid.duration() * payload.symbol_rate;
        const auto n_sym = static_cast<std::size_t>(std::llround(n_sym_real));
        if (n_sym < 1 || std::abs(n_sym_real - static_cast<double>(n_sym)) > 1e-6)
            throw ConfigError("shape_payload: window must hold a whole number of symbols");

        std::vector<double> symbols = payload.symbols;
        symbols.resize(n_sym);
        for (std::size_t i = payload.symbols.size(); i < n_sym; i++)
            symbols[i] = payload.symbols[i % payload.symbols.size()];

        shaped = (shaping == PulseShaping::BrickWall)
                     ? shape_brickwall(symbols, payload.symbol_rate, grid)
                     : shape_nrz(symbols, payload.symbol_rate, grid);
    }

    if (payload.baseband_limit_hz > 0.0 && strictness == NyquistStrictness::Error) {
        if (payload.kind == PayloadKind::Analog) {
            if (out_of_band_fraction(shaped, payload.baseband_limit_hz) > 1e-9)
                throw ConfigError("shape_payload: spectrum exceeds the channel's Nyquist band");
        } else if (shaping == PulseShaping::BrickWall) {
            if (payload.symbol_rate / 2.0 > payload.baseband_limit_hz * (1.0 + 1e-12))
                throw ConfigError("shape_payload: symbol rate exceeds the channel's Nyquist band");
        } else {
            // a rectangular hold always spills tails past any finite band
            throw ConfigError(
                "shape_payload: NRZ shaping violates the strict band limit (use warn-only)");
        }
    }
    return shaped;
}

// ---------------------------------------------------------------------------
// Electrical network, modulator, multiplexer

Waveform build_drive_signal(const std::vector<Waveform>& payload_waveforms, const TxPlan& plan,
                            const Grid& grid) {
    plan.validate();
    if (plan.architecture != TxArchitecture::SingleModulator)
        throw ConfigError("drive network: the electrical network feeds a single modulator");
    if (payload_waveforms.size() != static_cast<std::size_t>(plan.n_channels))
        throw ConfigError("drive network: payload count must equal the channel count");

    const int n = plan.rf_tone_count();
    const double df = plan.line_spacing_hz;
    const double dt_shift = 1.0 / plan.sequence_bandwidth_hz();

    Waveform drive = grid.zero();
    for (int l = 0; l < plan.n_channels; l++) {
        const auto& s = payload_waveforms[static_cast<std::size_t>(l)];
        if (s.size() != grid.length)
            throw ConfigError("drive network: payload waveform off the grid");
        for (std::size_t i = 0; i < grid.length; i++) {
            const double t = grid.time_at(i) - l * dt_shift;
            double mix = 1.0;  // DC weight; tones carry weight 2
            for (int k = 1; k <= n; k++) mix += 2.0 * std::cos(2.0 * M_PI * k * df * t);
            drive.samples[i] += s.samples[i].real() * mix;
        }
    }
    return drive;
}

Waveform modulate(double carrier_power, const Waveform& drive, const MzmModel& model) {
    model.validate();
    drive.validate();
    for (const auto& s : drive.samples)
        if (std::abs(s.imag()) > 1e-12)
            throw InputError("modulate: electrical drive must be real-valued");

    const double amp = std::sqrt(carrier_power);
    Waveform out = drive;
    if (model.mode == ModulatorMode::IdealMultiplier) {
        for (auto& s : out.samples) s = cdouble{amp * model.drive_scale * s.real(), 0.0};
    } else {
        for (auto& s : out.samples) {
            const double phase =
                M_PI * (s.real() * model.drive_scale + model.bias) / (2.0 * model.v_pi);
            s = cdouble{amp * std::cos(phase), 0.0};
        }
    }
    return out;
}

Waveform multiplex(const std::vector<Waveform>& payload_waveforms,
                   const std::vector<SincSequenceSpec>& specs) {
    if (payload_waveforms.empty() || payload_waveforms.size() != specs.size())
        throw ConfigError("multiplex: need one sequence spec per payload");
    const int n = specs.front().n_lines;
    const double b = specs.front().bandwidth_hz;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const auto& spec : specs) {
        spec.validate();
        if (spec.n_lines != n || spec.bandwidth_hz != b)
            throw ConfigError("multiplex: sequence specs disagree on (N, B)");
        if (seen[static_cast<std::size_t>(spec.shift_index)])
            throw ConfigError("multiplex: duplicate shift index");
        seen[static_cast<std::size_t>(spec.shift_index)] = true;
    }
    if (payload_waveforms.size() != static_cast<std::size_t>(n))
        throw ConfigError("multiplex: expected one payload per channel");

    const Grid grid = Grid::of(payload_waveforms.front());
    Waveform out = grid.zero();
    for (std::size_t c = 0; c < specs.size(); c++) {
        const auto& payload = payload_waveforms[c];
        if (payload.size() != grid.length)
            throw ConfigError("multiplex: payload waveforms on different grids");
        const Waveform seq = sequence_waveform(specs[c], grid);
        for (std::size_t i = 0; i < grid.length; i++)
            out.samples[i] += payload.samples[i] * seq.samples[i].real();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comb calibration

namespace {

struct CombQuality {
    double flatness_db = 0.0;
    double spur_fraction = 0.0;
    double line_power = 0.0;
};

// Line powers of the modulator output under an n-tone unit drive,
// integrated over one RF period.
CombQuality comb_quality(const MzmModel& model, int n_tones, int target_lines) {
    const int half = (target_lines - 1) / 2;
    const int h_max = 3 * half + 4;
    const int steps = 512;

    std::vector<cdouble> amp(static_cast<std::size_t>(2 * h_max + 1), cdouble{0.0, 0.0});
    for (int i = 0; i < steps; i++) {
        const double theta = 2.0 * M_PI * i / steps;
        double drive = 0.0;
        for (int k = 1; k <= n_tones; k++) drive += std::cos(k * theta);
        const double field =
            std::cos(M_PI * (drive * model.drive_scale + model.bias) / (2.0 * model.v_pi));
        for (int h = -h_max; h <= h_max; h++)
            amp[static_cast<std::size_t>(h + h_max)] +=
                field * std::polar(1.0 / steps, -h * theta);
    }

    CombQuality q;
    double mn = 1e300, mx = 0.0, outside = 0.0;
    for (int h = -h_max; h <= h_max; h++) {
        const double p = std::norm(amp[static_cast<std::size_t>(h + h_max)]);
        if (std::abs(h) <= half) {
            q.line_power += p;
            mn = std::min(mn, p);
            mx = std::max(mx, p);
        } else {
            outside += p;
        }
    }
    q.flatness_db = (mn > 0.0) ? 10.0 * std::log10(mx / mn) : 1e9;
    q.spur_fraction = (q.line_power > 0.0) ? outside / q.line_power : 1e9;
    return q;
}

double objective(const CombQuality& q) {
    return q.flatness_db + 40.0 * std::sqrt(q.spur_fraction);
}

} // namespace

CombCalibration calibrate_comb(const MzmModel& model, int n_tones, int target_lines) {
    model.validate();
    if (model.mode != ModulatorMode::PhysicalMzm)
        throw ConfigError("calibrate_comb: only the physical modulator needs calibration");
    if (n_tones < 0 || target_lines < 1 || target_lines % 2 == 0)
        throw ConfigError("calibrate_comb: target line count must be odd");
    if (target_lines != 2 * n_tones + 1)
        throw ConfigError("calibrate_comb: N = 2n + 1 lines per n tones");

    if (n_tones == 0) {
        // single line: any bias away from the null works; quadrature point
        MzmModel probe = model;
        probe.bias = model.v_pi / 2.0;
        probe.drive_scale = 0.0;
        const CombQuality q = comb_quality(probe, 0, 1);
        return {probe.bias, probe.drive_scale, q.flatness_db, q.spur_fraction};
    }

    // coarse 64x64 scan over bias in (0, v_pi), scale in (0, 2]; then zoom
    double best_obj = 1e300;
    double best_bias = model.v_pi / 2.0, best_scale = 1.0;
    double bias_lo = 0.0, bias_hi = model.v_pi, scale_lo = 0.0, scale_hi = 2.0;
    for (int pass = 0; pass < 6; pass++) {
        for (int i = 1; i <= 64; i++) {
            for (int j = 1; j <= 64; j++) {
                MzmModel probe = model;
                probe.bias = bias_lo + (bias_hi - bias_lo) * i / 65.0;
                probe.drive_scale = scale_lo + (scale_hi - scale_lo) * j / 65.0;
                const CombQuality q = comb_quality(probe, n_tones, target_lines);
                const double obj = objective(q);
                if (obj < best_obj - 1e-12) {
                    best_obj = obj;
                    best_bias = probe.bias;
                    best_scale = probe.drive_scale;
                }
            }
        }
        const double bw = (bias_hi - bias_lo) / 16.0;
        const double sw = (scale_hi - scale_lo) / 16.0;
        bias_lo = std::max(0.0, best_bias - bw);
        bias_hi = std::min(model.v_pi, best_bias + bw);
        scale_lo = std::max(0.0, best_scale - sw);
        scale_hi = std::min(2.0, best_scale + sw);
    }

    MzmModel tuned = model;
    tuned.bias = best_bias;
    tuned.drive_scale = best_scale;
    const CombQuality q = comb_quality(tuned, n_tones, target_lines);
    if (q.flatness_db > 1.0)
        throw CalibrationError("calibrate_comb: no operating point under 1 dB flatness");
    return {best_bias, best_scale, q.flatness_db, q.spur_fraction};
}

RatePlan plan_symbol_rate(TxArchitecture architecture, double bm_hz, int n_channels) {
    if (n_channels < 3 || n_channels % 2 == 0)
        throw ConfigError("rate plan: channel count must be odd and >= 3");
    if (!(bm_hz > 0.0)) throw ConfigError("rate plan: modulator bandwidth must be > 0");

    RatePlan plan;
    const auto n = static_cast<double>(n_channels);
    if (architecture == TxArchitecture::SingleModulator) {
        plan.per_channel_baud = bm_hz / n;
        plan.combined_baud = bm_hz;
        plan.optical_bandwidth_hz = 2.0 * bm_hz;
    } else {
        plan.per_channel_baud = bm_hz / (n - 1.0);
        plan.combined_baud = bm_hz * n / (n - 1.0);
        plan.optical_bandwidth_hz = 2.0 * bm_hz * n / (n - 1.0);
    }
    return plan;
}

} // namespace sincmux
