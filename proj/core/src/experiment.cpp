#include "sincmux/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "sincmux/errors.hpp"

namespace sincmux {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// enum <-> string

namespace {

template <typename E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<PayloadKind> kPayloadKinds[] = {
    {PayloadKind::Ook, "ook"},
    {PayloadKind::Bpsk, "bpsk"},
    {PayloadKind::FourLevelBpsk, "four-level-bpsk"},
    {PayloadKind::Analog, "analog"},
};
constexpr EnumName<PulseShaping> kShapings[] = {
    {PulseShaping::BrickWall, "brickwall"},
    {PulseShaping::Nrz, "nrz"},
};
constexpr EnumName<NyquistStrictness> kStrictness[] = {
    {NyquistStrictness::Error, "error"},
    {NyquistStrictness::WarnOnly, "warn-only"},
};
constexpr EnumName<ModulatorMode> kModulatorModes[] = {
    {ModulatorMode::IdealMultiplier, "ideal-multiplier"},
    {ModulatorMode::PhysicalMzm, "physical-mzm"},
};
constexpr EnumName<TxArchitecture> kArchitectures[] = {
    {TxArchitecture::SingleModulator, "single-modulator"},
    {TxArchitecture::CascadedModulators, "cascaded-modulators"},
};
constexpr EnumName<FilterDomain> kFilterDomains[] = {
    {FilterDomain::LowpassBaseband, "lowpass-baseband"},
    {FilterDomain::BandpassAtCarrier, "bandpass-at-carrier"},
};
constexpr EnumName<EvmNormalization> kEvmNorms[] = {
    {EvmNormalization::AvgPower, "avg-power"},
    {EvmNormalization::PeakPower, "peak-power"},
};
constexpr EnumName<SweepVariable> kSweepVars[] = {
    {SweepVariable::VoaAttenuation, "voa_attenuation"},
    {SweepVariable::FiberLength, "fiber_length"},
    {SweepVariable::NoisePower, "noise_power"},
    {SweepVariable::ClockPhaseError, "clock_phase_error"},
};

template <typename E, std::size_t N>
const char* to_name(const EnumName<E> (&table)[N], E value) {
    for (const auto& e : table)
        if (e.value == value) return e.name;
    throw ConfigError("unknown enum value");
}

template <typename E, std::size_t N>
E from_name(const EnumName<E> (&table)[N], const std::string& name, const char* field) {
    for (const auto& e : table)
        if (name == e.name) return e.value;
    throw ConfigError(std::string("config: unknown value '") + name + "' for " + field);
}

} // namespace

const char* sweep_variable_name(SweepVariable v) { return to_name(kSweepVars, v); }

SweepVariable sweep_variable_from_name(const std::string& name) {
    return from_name(kSweepVars, name, "sweep.variable");
}

// ---------------------------------------------------------------------------
// validation

void ExperimentConfig::validate() const {
    tx.plan.validate();
    tx.modulator.validate();
    if (tx.payloads.size() != static_cast<std::size_t>(tx.plan.n_channels))
        throw ConfigError("config: payload count must equal tx.plan.n_channels");
    if (tx.oversampling < 2) throw ConfigError("config: oversampling must be >= 2");
    if (tx.periods_per_segment == 0) throw ConfigError("config: periods_per_segment must be > 0");
    if (tx.segments < 1) throw ConfigError("config: segments must be >= 1");
    channel.fiber.validate();
    channel.voa.validate();
    channel.amp.validate();
    const double band_limit = tx.plan.sequence_bandwidth_hz() / (2.0 * tx.plan.n_channels);
    for (const auto& p : tx.payloads) {
        if (p.kind != PayloadKind::Analog && !(p.symbol_rate > 0.0))
            throw ConfigError("config: digital payloads need a symbol rate");
        if (p.kind == PayloadKind::Analog && p.analog_frequency_hz > 0.0 &&
            p.analog_frequency_hz > band_limit)
            throw ConfigError("config: analog tone exceeds the per-channel band B/(2N)");
    }
    if (rx.edge_exclude_periods * 2 >= tx.periods_per_segment)
        throw ConfigError("config: rx.edge_exclude_periods leaves no usable window");
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep: no values");
    if (repetitions < 1) throw ConfigError("sweep: repetitions must be >= 1");
    if (workers < 1) throw ConfigError("sweep: workers must be >= 1");
}

// ---------------------------------------------------------------------------
// config (de)serialization

namespace {

ordered_json payload_to_json(const PayloadConfig& p) {
    ordered_json j;
    j["kind"] = to_name(kPayloadKinds, p.kind);
    if (p.kind == PayloadKind::Analog) {
        j["analog_frequency_hz"] = p.analog_frequency_hz;
        j["analog_amplitude"] = p.analog_amplitude;
        j["analog_bandwidth_hz"] = p.analog_bandwidth_hz;
    } else {
        j["symbol_rate"] = p.symbol_rate;
        j["prbs_seed"] = p.prbs_seed;
    }
    return j;
}

PayloadConfig payload_from_json(const ordered_json& j) {
    PayloadConfig p;
    p.kind = from_name(kPayloadKinds, j.at("kind").get<std::string>(), "payload.kind");
    if (p.kind == PayloadKind::Analog) {
        p.analog_frequency_hz = j.value("analog_frequency_hz", 0.0);
        p.analog_amplitude = j.value("analog_amplitude", 1.0);
        p.analog_bandwidth_hz = j.value("analog_bandwidth_hz", 0.0);
    } else {
        p.symbol_rate = j.value("symbol_rate", 4e9);
        p.prbs_seed = static_cast<std::uint8_t>(j.value("prbs_seed", 0x7f));
    }
    return p;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["name"] = cfg.name;
    j["seed"] = cfg.seed.value;
    j["output_dir"] = cfg.output_dir;

    ordered_json tx;
    tx["n_channels"] = cfg.tx.plan.n_channels;
    tx["line_spacing_hz"] = cfg.tx.plan.line_spacing_hz;
    tx["architecture"] = to_name(kArchitectures, cfg.tx.plan.architecture);
    tx["modulator"] = {
        {"mode", to_name(kModulatorModes, cfg.tx.modulator.mode)},
        {"v_pi", cfg.tx.modulator.v_pi},
        {"bias", cfg.tx.modulator.bias},
        {"drive_scale", cfg.tx.modulator.drive_scale},
    };
    tx["carrier_power"] = cfg.tx.carrier_power;
    tx["shaping"] = to_name(kShapings, cfg.tx.shaping);
    tx["nyquist_strictness"] = to_name(kStrictness, cfg.tx.strictness);
    tx["equal_average_power"] = cfg.tx.equal_average_power;
    tx["oversampling"] = cfg.tx.oversampling;
    tx["periods_per_segment"] = cfg.tx.periods_per_segment;
    tx["segments"] = cfg.tx.segments;
    tx["payloads"] = ordered_json::array();
    for (const auto& p : cfg.tx.payloads) tx["payloads"].push_back(payload_to_json(p));
    j["tx"] = tx;

    ordered_json ch;
    ch["fiber_enabled"] = cfg.channel.fiber_enabled;
    ch["fiber"] = {
        {"length_km", cfg.channel.fiber.length_km},
        {"dispersion_ps_nm_km", cfg.channel.fiber.dispersion_ps_nm_km},
        {"attenuation_db_km", cfg.channel.fiber.attenuation_db_km},
        {"center_wavelength_nm", cfg.channel.fiber.center_wavelength_nm},
    };
    ch["bpf_enabled"] = cfg.channel.bpf_enabled;
    ch["bpf_width_hz"] = cfg.channel.bpf_width_hz;
    ch["voa_enabled"] = cfg.channel.voa_enabled;
    ch["voa"] = {
        {"attenuation_db", cfg.channel.voa.attenuation_db},
        {"insertion_loss_db", cfg.channel.voa.insertion_loss_db},
    };
    ch["amp_enabled"] = cfg.channel.amp_enabled;
    ch["amp"] = {
        {"gain_db", cfg.channel.amp.gain_db},
        {"noise_power", cfg.channel.amp.noise_power},
    };
    ch["normalize_at_receiver"] = cfg.channel.normalize_at_receiver;
    j["channel"] = ch;

    ordered_json rx;
    rx["filter_domain"] = to_name(kFilterDomains, cfg.rx.filter_domain);
    rx["lo_phase_error"] = cfg.rx.lo_phase_error;
    rx["clock_phase_error"] = cfg.rx.clock_phase_error;
    rx["rescale_by_n"] = cfg.rx.rescale_by_n;
    rx["edge_exclude_periods"] = cfg.rx.edge_exclude_periods;
    j["rx"] = rx;

    ordered_json me;
    me["evm"] = cfg.metrics.evm;
    me["ber"] = cfg.metrics.ber;
    me["eye"] = cfg.metrics.eye;
    me["psd"] = cfg.metrics.psd;
    me["sinad"] = cfg.metrics.sinad;
    me["reconstruction"] = cfg.metrics.reconstruction;
    me["eye_time_bins"] = cfg.metrics.eye_time_bins;
    me["eye_amplitude_bins"] = cfg.metrics.eye_amplitude_bins;
    me["psd_rbw_hz"] = cfg.metrics.psd_rbw_hz;
    me["evm_normalization"] = to_name(kEvmNorms, cfg.metrics.evm_normalization);
    j["metrics"] = me;
    return j;
}

ExperimentConfig config_from_json(const ordered_json& j) {
    ExperimentConfig cfg;
    cfg.name = j.value("name", std::string("experiment"));
    cfg.seed.value = j.value("seed", std::uint64_t{0});
    cfg.output_dir = j.value("output_dir", std::string());

    if (j.contains("tx")) {
        const auto& tx = j.at("tx");
        cfg.tx.plan.n_channels = tx.value("n_channels", 3);
        cfg.tx.plan.line_spacing_hz = tx.value("line_spacing_hz", 8e9);
        cfg.tx.plan.architecture = from_name(
            kArchitectures, tx.value("architecture", std::string("single-modulator")),
            "tx.architecture");
        if (tx.contains("modulator")) {
            const auto& m = tx.at("modulator");
            cfg.tx.modulator.mode = from_name(
                kModulatorModes, m.value("mode", std::string("ideal-multiplier")),
                "tx.modulator.mode");
            cfg.tx.modulator.v_pi = m.value("v_pi", 1.0);
            cfg.tx.modulator.bias = m.value("bias", 0.5);
            cfg.tx.modulator.drive_scale = m.value("drive_scale", 1.0);
        }
        cfg.tx.carrier_power = tx.value("carrier_power", 1.0);
        cfg.tx.shaping = from_name(kShapings, tx.value("shaping", std::string("brickwall")),
                                   "tx.shaping");
        cfg.tx.strictness = from_name(
            kStrictness, tx.value("nyquist_strictness", std::string("error")),
            "tx.nyquist_strictness");
        cfg.tx.equal_average_power = tx.value("equal_average_power", false);
        cfg.tx.oversampling = tx.value("oversampling", 16);
        cfg.tx.periods_per_segment = tx.value("periods_per_segment", std::uint64_t{4096});
        cfg.tx.segments = tx.value("segments", 1);
        if (tx.contains("payloads"))
            for (const auto& p : tx.at("payloads")) cfg.tx.payloads.push_back(payload_from_json(p));
    }

    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        cfg.channel.fiber_enabled = ch.value("fiber_enabled", false);
        if (ch.contains("fiber")) {
            const auto& f = ch.at("fiber");
            cfg.channel.fiber.length_km = f.value("length_km", 0.0);
            cfg.channel.fiber.dispersion_ps_nm_km = f.value("dispersion_ps_nm_km", 17.0);
            cfg.channel.fiber.attenuation_db_km = f.value("attenuation_db_km", 0.2);
            cfg.channel.fiber.center_wavelength_nm = f.value("center_wavelength_nm", 1550.116);
        }
        cfg.channel.bpf_enabled = ch.value("bpf_enabled", false);
        cfg.channel.bpf_width_hz = ch.value("bpf_width_hz", 125e9);
        cfg.channel.voa_enabled = ch.value("voa_enabled", false);
        if (ch.contains("voa")) {
            const auto& v = ch.at("voa");
            cfg.channel.voa.attenuation_db = v.value("attenuation_db", 0.0);
            cfg.channel.voa.insertion_loss_db = v.value("insertion_loss_db", 4.0);
        }
        cfg.channel.amp_enabled = ch.value("amp_enabled", false);
        if (ch.contains("amp")) {
            const auto& a = ch.at("amp");
            cfg.channel.amp.gain_db = a.value("gain_db", 0.0);
            cfg.channel.amp.noise_power = a.value("noise_power", 0.0);
        }
        cfg.channel.normalize_at_receiver = ch.value("normalize_at_receiver", false);
    }

    if (j.contains("rx")) {
        const auto& rx = j.at("rx");
        cfg.rx.filter_domain = from_name(
            kFilterDomains, rx.value("filter_domain", std::string("lowpass-baseband")),
            "rx.filter_domain");
        cfg.rx.lo_phase_error = rx.value("lo_phase_error", 0.0);
        cfg.rx.clock_phase_error = rx.value("clock_phase_error", 0.0);
        cfg.rx.rescale_by_n = rx.value("rescale_by_n", true);
        cfg.rx.edge_exclude_periods = rx.value("edge_exclude_periods", std::uint64_t{1});
    }

    if (j.contains("metrics")) {
        const auto& me = j.at("metrics");
        cfg.metrics.evm = me.value("evm", true);
        cfg.metrics.ber = me.value("ber", true);
        cfg.metrics.eye = me.value("eye", false);
        cfg.metrics.psd = me.value("psd", false);
        cfg.metrics.sinad = me.value("sinad", true);
        cfg.metrics.reconstruction = me.value("reconstruction", false);
        cfg.metrics.eye_time_bins = me.value("eye_time_bins", std::size_t{64});
        cfg.metrics.eye_amplitude_bins = me.value("eye_amplitude_bins", std::size_t{64});
        cfg.metrics.psd_rbw_hz = me.value("psd_rbw_hz", 0.0);
        cfg.metrics.evm_normalization = from_name(
            kEvmNorms, me.value("evm_normalization", std::string("avg-power")),
            "metrics.evm_normalization");
    }
    return cfg;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    const auto j = ordered_json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    ExperimentConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open config file: " + file.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config(ss.str());
}

// ---------------------------------------------------------------------------
// link execution

namespace {

struct ChannelAccumulator {
    PayloadKind kind = PayloadKind::Bpsk;
    std::vector<cdouble> decision_values;   // affine-aligned symbol readings
    std::vector<double> reference_levels;   // transmitted levels at the same instants
    double reconstruction_error = 0.0;      // max over segments
    Waveform corrected_first;               // first segment, aligned to the reference
    DemuxResult demux_first;
    double tone_hz = 0.0;
};

std::vector<cdouble> constellation_of(PayloadKind kind) {
    switch (kind) {
        case PayloadKind::Ook: return {cdouble{0, 0}, cdouble{1, 0}};
        case PayloadKind::Bpsk: return {cdouble{-1, 0}, cdouble{1, 0}};
        case PayloadKind::FourLevelBpsk:
            return {cdouble{-1, 0}, cdouble{-1.0 / 3.0, 0}, cdouble{1.0 / 3.0, 0},
                    cdouble{1, 0}};
        case PayloadKind::Analog: return {};
    }
    return {};
}

double level_of_bits(PayloadKind kind, Prbs7Stream& stream) {
    switch (kind) {
        case PayloadKind::Ook: return stream.next_bit() ? 1.0 : 0.0;
        case PayloadKind::Bpsk: return stream.next_bit() ? 1.0 : -1.0;
        case PayloadKind::FourLevelBpsk: {
            // Gray order over {-1, -1/3, +1/3, +1}
            static constexpr double levels[4] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
            const std::uint8_t b0 = stream.next_bit();
            const std::uint8_t b1 = stream.next_bit();
            const std::size_t idx = b0 ? (b1 ? 2 : 3) : (b1 ? 1 : 0);
            return levels[idx];
        }
        case PayloadKind::Analog: break;
    }
    throw ConfigError("analog payloads have no symbols");
}

void write_text_atomic(const std::filesystem::path& file, const std::string& text) {
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw InputError("cannot open for writing: " + tmp);
        os << text;
    }
    std::filesystem::rename(tmp, file);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    const int n_ch = cfg.tx.plan.n_channels;
    const double bandwidth = cfg.tx.plan.sequence_bandwidth_hz();
    const double band_limit = bandwidth / (2.0 * n_ch);
    const SincSequenceSpec base_spec{n_ch, bandwidth, 0};
    const Grid segment_grid =
        sequence_grid(base_spec, cfg.tx.oversampling, cfg.tx.periods_per_segment);
    const double segment_duration = segment_grid.duration();

    // per-channel persistent symbol streams
    std::vector<std::unique_ptr<Prbs7Stream>> streams;
    for (const auto& p : cfg.tx.payloads) {
        streams.push_back(p.kind == PayloadKind::Analog
                              ? nullptr
                              : std::make_unique<Prbs7Stream>(PrbsSpec{p.prbs_seed}));
    }

    std::vector<SincSequenceSpec> specs;
    for (int l = 0; l < n_ch; l++) specs.push_back(cfg.tx.plan.sequence_spec(l));

    std::vector<ChannelAccumulator> acc(static_cast<std::size_t>(n_ch));
    for (int l = 0; l < n_ch; l++)
        acc[static_cast<std::size_t>(l)].kind = cfg.tx.payloads[static_cast<std::size_t>(l)].kind;

    const bool want_artifacts = !cfg.output_dir.empty();
    if (want_artifacts) std::filesystem::create_directories(cfg.output_dir);
    Waveform tx_field_first;

    for (int seg = 0; seg < cfg.tx.segments; seg++) {
        Grid grid = segment_grid;
        grid.t0 = static_cast<double>(seg) * segment_duration;

        // --- payload generation + shaping
        std::vector<Waveform> shaped(static_cast<std::size_t>(n_ch));
        std::vector<Waveform> references(static_cast<std::size_t>(n_ch));
        std::vector<std::vector<double>> segment_levels(static_cast<std::size_t>(n_ch));
        for (int l = 0; l < n_ch; l++) {
            const auto& pc = cfg.tx.payloads[static_cast<std::size_t>(l)];
            const auto li = static_cast<std::size_t>(l);
            if (pc.kind == PayloadKind::Analog) {
                Waveform w;
                if (pc.analog_frequency_hz > 0.0) {
                    w = grid.zero();
                    for (std::size_t i = 0; i < grid.length; i++)
                        w.samples[i] = cdouble{
                            pc.analog_amplitude *
                                std::cos(2.0 * M_PI * pc.analog_frequency_hz * grid.time_at(i)),
                            0.0};
                } else {
                    const double bw =
                        pc.analog_bandwidth_hz > 0.0 ? pc.analog_bandwidth_hz : band_limit * 0.875;
                    w = random_bandlimited(
                        2.0 * bw, grid.duration(), grid.sample_rate,
                        derive_seed(cfg.seed, "analog-payload",
                                    static_cast<std::uint64_t>(seg) * 64 + static_cast<std::uint64_t>(l)),
                        true);
                    for (auto& s : w.samples) s *= pc.analog_amplitude;
                    w.t0 = grid.t0;
                }
                ChannelPayload payload;
                payload.kind = PayloadKind::Analog;
                payload.analog_waveform = w;
                payload.baseband_limit_hz = band_limit;
                shaped[li] = shape_payload(payload, grid, cfg.tx.shaping, cfg.tx.strictness);
            } else {
                const double n_sym_real = segment_duration * pc.symbol_rate;
                const auto n_sym = static_cast<std::size_t>(std::llround(n_sym_real));
                if (n_sym < 1 || std::abs(n_sym_real - static_cast<double>(n_sym)) > 1e-6)
                    throw ConfigError("config: segment must hold a whole number of symbols");
                auto& levels = segment_levels[li];
                levels.resize(n_sym);
                for (auto& v : levels) v = level_of_bits(pc.kind, *streams[li]);

                ChannelPayload payload;
                payload.kind = pc.kind;
                payload.symbol_rate = pc.symbol_rate;
                payload.symbols = levels;
                payload.baseband_limit_hz = band_limit;
                shaped[li] = shape_payload(payload, grid, cfg.tx.shaping, cfg.tx.strictness);

                if (cfg.tx.equal_average_power) {
                    double mean_power = 0.0;
                    for (const auto& c : constellation_of(pc.kind)) mean_power += std::norm(c);
                    mean_power /= static_cast<double>(constellation_of(pc.kind).size());
                    if (mean_power > 0.0) {
                        const double g = 1.0 / std::sqrt(mean_power);
                        for (auto& s : shaped[li].samples) s *= g;
                    }
                }
            }
            references[li] = shaped[li];
        }

        // --- transmitter: electrical network into one modulator
        const Waveform drive = build_drive_signal(shaped, cfg.tx.plan, grid);
        Waveform field = modulate(cfg.tx.carrier_power, drive, cfg.tx.modulator);

        // --- channel
        if (cfg.channel.fiber_enabled) field = propagate_fiber(field, cfg.channel.fiber);
        if (cfg.channel.bpf_enabled)
            field = brickwall_filter(field, cfg.channel.bpf_width_hz, 0.0);
        if (cfg.channel.normalize_at_receiver) {
            const double p = field.power();
            if (p > 0.0) {
                const double g = 1.0 / std::sqrt(p);
                for (auto& s : field.samples) s *= g;
            }
        }
        if (cfg.channel.voa_enabled) field = apply_voa(field, cfg.channel.voa);
        if (cfg.channel.amp_enabled)
            field = amplify(field, cfg.channel.amp,
                            derive_seed(cfg.seed, "amp-noise", static_cast<std::uint64_t>(seg)));

        if (want_artifacts && seg == 0) tx_field_first = field;

        // --- receiver, channel by channel
        for (int l = 0; l < n_ch; l++) {
            const auto li = static_cast<std::size_t>(l);
            RxConfig rx;
            rx.target_shift = l;
            rx.filter_domain = cfg.rx.filter_domain;
            rx.lo_phase_error = cfg.rx.lo_phase_error;
            rx.clock_phase_error = cfg.rx.clock_phase_error;
            rx.rescale_by_n = cfg.rx.rescale_by_n;

            Waveform filtered = demultiplex(field, specs[li], rx);
            const double rescale = cfg.rx.rescale_by_n ? static_cast<double>(n_ch) : 1.0;

            // interior sample range for this segment
            const auto m = static_cast<std::uint64_t>(cfg.tx.oversampling);
            const std::uint64_t period_samples = static_cast<std::uint64_t>(n_ch) * m;
            const std::uint64_t lo = cfg.rx.edge_exclude_periods * period_samples;
            const std::uint64_t hi = grid.length - cfg.rx.edge_exclude_periods * period_samples;

            const auto& pc = cfg.tx.payloads[li];
            auto& a = acc[li];

            if (seg == 0) {
                // first-segment aligned waveform feeds eye/psd/sinad and dumps
                auto aligned = affine_align(filtered.samples, references[li].samples);
                a.corrected_first = filtered;
                a.corrected_first.samples = std::move(aligned);
                a.demux_first = extract_samples(filtered, specs[li], rx,
                                                cfg.rx.edge_exclude_periods);
                a.tone_hz = (pc.kind == PayloadKind::Analog) ? pc.analog_frequency_hz : 0.0;
            }

            if (pc.kind == PayloadKind::Analog) {
                // waveform-level metrics on the interior window
                if (cfg.metrics.reconstruction) {
                    double worst = 0.0, ref_peak = 0.0;
                    const std::size_t q0 = grid.length / 4, q1 = grid.length - grid.length / 4;
                    for (std::size_t i = q0; i < q1; i++)
                        ref_peak = std::max(ref_peak, std::abs(references[li].samples[i]));
                    for (std::size_t i = q0; i < q1; i++) {
                        const double err = std::abs(filtered.samples[i] * rescale -
                                                    references[li].samples[i]);
                        worst = std::max(worst, err);
                    }
                    if (ref_peak > 0.0)
                        a.reconstruction_error = std::max(a.reconstruction_error, worst / ref_peak);
                }
            } else {
                // decision-instant readings: symbol j lives at t = t0 + j/R
                // (brick-wall shaping) or mid-symbol (NRZ hold)
                const double sps_real = grid.sample_rate / pc.symbol_rate;
                const auto sps = static_cast<std::uint64_t>(std::llround(sps_real));
                const std::uint64_t offset =
                    (cfg.tx.shaping == PulseShaping::Nrz) ? sps / 2 : 0;
                const auto& levels = segment_levels[li];

                std::vector<cdouble> readings;
                std::vector<double> refs;
                readings.reserve(levels.size());
                for (std::size_t jsym = 0; jsym < levels.size(); jsym++) {
                    const std::uint64_t idx = jsym * sps + offset;
                    if (idx < lo || idx >= hi) continue;
                    readings.push_back(filtered.samples[idx]);
                    refs.push_back(levels[jsym]);
                }
                // per-segment one-tap gain/offset equalization against the
                // known reference before decision and EVM
                std::vector<cdouble> ref_c(refs.size());
                for (std::size_t i = 0; i < refs.size(); i++) ref_c[i] = cdouble{refs[i], 0.0};
                auto corrected = affine_align(readings, ref_c);
                a.decision_values.insert(a.decision_values.end(), corrected.begin(),
                                         corrected.end());
                a.reference_levels.insert(a.reference_levels.end(), refs.begin(), refs.end());
            }
        }
    }

    // --- metrics
    ExperimentResult result;
    for (int l = 0; l < n_ch; l++) {
        const auto li = static_cast<std::size_t>(l);
        auto& a = acc[li];
        ChannelResult ch;
        ch.kind = a.kind;

        if (a.kind == PayloadKind::Analog) {
            if (cfg.metrics.reconstruction) ch.metrics.reconstruction_error = a.reconstruction_error;
            if (cfg.metrics.sinad && a.tone_hz > 0.0)
                ch.metrics.sinad_db = sinad_db(a.corrected_first, a.tone_hz);
        } else {
            const auto constellation = constellation_of(a.kind);
            if (cfg.metrics.evm && !a.decision_values.empty())
                ch.metrics.evm_percent =
                    evm_percent(a.decision_values, constellation, cfg.metrics.evm_normalization);
            if (cfg.metrics.ber && !a.decision_values.empty()) {
                const auto decided = decide_symbols(a.decision_values, a.kind);
                const auto tx_bits = symbols_to_bits(a.reference_levels, a.kind);
                const auto r = ber(tx_bits, decided.bits);
                ch.metrics.ber_ratio = r.ratio;
                ch.metrics.bit_errors = r.errors;
                ch.metrics.bits_counted = r.bits;
            }
            if (cfg.metrics.eye) {
                const double symbol_period = 1.0 / cfg.tx.payloads[li].symbol_rate;
                ch.metrics.eye = eye_histogram(a.corrected_first, symbol_period,
                                               cfg.metrics.eye_time_bins,
                                               cfg.metrics.eye_amplitude_bins);
            }
        }
        if (cfg.metrics.psd) {
            const double rbw = cfg.metrics.psd_rbw_hz > 0.0
                                   ? cfg.metrics.psd_rbw_hz
                                   : a.corrected_first.sample_rate / 64.0;
            ch.metrics.psd = psd(a.corrected_first, rbw);
        }
        result.channels.push_back(std::move(ch));
    }

    // --- report
    ordered_json report;
    report["name"] = cfg.name;
    report["seed"] = cfg.seed.value;
    ordered_json assumptions = ordered_json::array();
    if (cfg.channel.fiber_enabled) {
        assumptions.push_back("fiber dispersion_ps_nm_km=" +
                              std::to_string(cfg.channel.fiber.dispersion_ps_nm_km) +
                              " (assumed; standard SMF, not a measured parameter)");
        assumptions.push_back("fiber attenuation_db_km=" +
                              std::to_string(cfg.channel.fiber.attenuation_db_km) +
                              " (assumed; standard SMF, not a measured parameter)");
    }
    if (cfg.channel.amp_enabled && cfg.channel.amp.noise_power > 0.0)
        assumptions.push_back("amplifier noise_power is a free model parameter (assumed)");
    report["assumptions"] = assumptions;
    report["config"] = config_to_json(cfg);
    report["channels"] = ordered_json::array();
    for (int l = 0; l < n_ch; l++) {
        const auto li = static_cast<std::size_t>(l);
        const auto& m = result.channels[li].metrics;
        ordered_json cj;
        cj["index"] = l;
        cj["kind"] = to_name(kPayloadKinds, result.channels[li].kind);
        if (m.evm_percent) cj["evm_percent"] = *m.evm_percent;
        if (m.ber_ratio) {
            cj["ber"] = *m.ber_ratio;
            cj["bit_errors"] = m.bit_errors;
            cj["bits_counted"] = m.bits_counted;
        }
        if (m.sinad_db) cj["sinad_db"] = *m.sinad_db;
        if (m.reconstruction_error) cj["reconstruction_error"] = *m.reconstruction_error;
        if (m.eye) {
            cj["eye"] = {{"time_bins", m.eye->time_bins},
                         {"amplitude_bins", m.eye->amplitude_bins},
                         {"amplitude_min", m.eye->amplitude_min},
                         {"amplitude_max", m.eye->amplitude_max},
                         {"window_s", m.eye->window_s},
                         {"counts", m.eye->counts}};
        }
        if (m.psd) {
            cj["psd"] = {{"frequency_hz", m.psd->frequency_hz},
                         {"db_rel_peak", m.psd->db_rel_peak}};
        }
        report["channels"].push_back(cj);
    }
    result.report_json = report.dump(2) + "\n";

    if (want_artifacts) {
        const std::filesystem::path out(cfg.output_dir);
        write_text_atomic(out / "report.json", result.report_json);
        write_text_atomic(out / "config.json", serialize_experiment_config(cfg));
        write_waveform(out / "tx_field.bin", tx_field_first);
        for (int l = 0; l < n_ch; l++) {
            const auto li = static_cast<std::size_t>(l);
            const auto& m = result.channels[li].metrics;
            if (!acc[li].demux_first.sample_values.empty())
                write_demux_csv(out / ("ch" + std::to_string(l) + "_demux.csv"),
                                acc[li].demux_first);
            if (acc[li].corrected_first.size() > 0)
                write_waveform(out / ("ch" + std::to_string(l) + "_recovered.bin"),
                               acc[li].corrected_first);
            if (m.eye) write_eye_pgm(out / ("ch" + std::to_string(l) + "_eye.pgm"), *m.eye);
            if (m.psd) write_psd_csv(out / ("ch" + std::to_string(l) + "_psd.csv"), *m.psd);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// sweeps

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep) {
    cfg.validate();
    sweep.validate();

    struct Task {
        std::size_t point;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < sweep.values.size(); p++)
        for (int r = 0; r < sweep.repetitions; r++) tasks.push_back({p, r});

    std::vector<std::vector<ExperimentResult>> results(sweep.values.size());
    for (auto& v : results) v.resize(static_cast<std::size_t>(sweep.repetitions));

    auto run_task = [&](const Task& task) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.output_dir.clear();
        const double value = sweep.values[task.point];
        switch (sweep.variable) {
            case SweepVariable::VoaAttenuation:
                point_cfg.channel.voa_enabled = true;
                point_cfg.channel.voa.attenuation_db = value;
                break;
            case SweepVariable::FiberLength:
                point_cfg.channel.fiber_enabled = true;
                point_cfg.channel.fiber.length_km = value;
                break;
            case SweepVariable::NoisePower:
                point_cfg.channel.amp_enabled = true;
                point_cfg.channel.amp.noise_power = value;
                break;
            case SweepVariable::ClockPhaseError:
                point_cfg.rx.clock_phase_error = value;
                break;
        }
        point_cfg.seed = derive_seed(cfg.seed, "sweep-point",
                                     task.point * 1024 + static_cast<std::uint64_t>(task.rep));
        results[task.point][static_cast<std::size_t>(task.rep)] = run_experiment(point_cfg);
    };

    if (sweep.workers == 1 || tasks.size() == 1) {
        for (const auto& t : tasks) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        const auto n_workers =
            std::min<std::size_t>(static_cast<std::size_t>(sweep.workers), tasks.size());
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; w++) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) return;
                    run_task(tasks[i]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    SweepResult out;
    std::ostringstream csv;
    csv.precision(12);
    csv << "value,channel,kind,ber,bit_errors,bits,evm_percent\n";
    for (std::size_t p = 0; p < sweep.values.size(); p++) {
        SweepPoint point;
        point.value = sweep.values[p];
        // pool repetitions: bit counts add, EVM averages
        const auto n_ch = results[p][0].channels.size();
        for (std::size_t c = 0; c < n_ch; c++) {
            ChannelResult ch;
            ch.kind = results[p][0].channels[c].kind;
            std::uint64_t errors = 0, bits = 0;
            double evm_sum = 0.0;
            int evm_n = 0;
            for (const auto& rep : results[p]) {
                const auto& m = rep.channels[c].metrics;
                errors += m.bit_errors;
                bits += m.bits_counted;
                if (m.evm_percent) {
                    evm_sum += *m.evm_percent;
                    evm_n++;
                }
            }
            if (bits > 0) {
                ch.metrics.ber_ratio = static_cast<double>(errors) / static_cast<double>(bits);
                ch.metrics.bit_errors = errors;
                ch.metrics.bits_counted = bits;
            }
            if (evm_n > 0) ch.metrics.evm_percent = evm_sum / evm_n;
            csv << point.value << ',' << c << ','
                << to_name(kPayloadKinds, ch.kind) << ','
                << (ch.metrics.ber_ratio ? *ch.metrics.ber_ratio : 0.0) << ','
                << ch.metrics.bit_errors << ',' << ch.metrics.bits_counted << ','
                << (ch.metrics.evm_percent ? *ch.metrics.evm_percent : 0.0) << '\n';
            point.channels.push_back(std::move(ch));
        }
        out.points.push_back(std::move(point));
    }
    out.table_csv = csv.str();

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        write_text_atomic(std::filesystem::path(cfg.output_dir) /
                              (std::string("sweep_") + sweep_variable_name(sweep.variable) + ".csv"),
                          out.table_csv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// presets

namespace {

ExperimentConfig base_link_config() {
    ExperimentConfig cfg;
    cfg.tx.plan.n_channels = 3;
    cfg.tx.plan.line_spacing_hz = 8e9;  // B = 24 GHz
    cfg.tx.plan.architecture = TxArchitecture::SingleModulator;
    cfg.tx.oversampling = 16;
    cfg.tx.periods_per_segment = 4096;  // 512 ns per segment
    cfg.tx.segments = 1;
    cfg.tx.carrier_power = 1.0;
    cfg.tx.shaping = PulseShaping::BrickWall;
    cfg.rx.filter_domain = FilterDomain::LowpassBaseband;
    cfg.rx.rescale_by_n = true;
    cfg.rx.edge_exclude_periods = 1;
    return cfg;
}

void use_ideal_modulator(ExperimentConfig& cfg) {
    cfg.tx.modulator.mode = ModulatorMode::IdealMultiplier;
    cfg.tx.modulator.drive_scale = 1.0 / static_cast<double>(cfg.tx.plan.n_channels);
}

// Calibrated near-null operating point for the 3-line comb (v_pi = 1).
// The drive network's tone weight 2 is folded into the scale.
void use_physical_mzm(ExperimentConfig& cfg) {
    cfg.tx.modulator.mode = ModulatorMode::PhysicalMzm;
    cfg.tx.modulator.v_pi = 1.0;
    cfg.tx.modulator.bias = 0.9566;
    cfg.tx.modulator.drive_scale = 0.0433;
}

PayloadConfig digital_payload(PayloadKind kind, std::uint8_t prbs_seed) {
    PayloadConfig p;
    p.kind = kind;
    p.symbol_rate = 4e9;
    p.prbs_seed = prbs_seed;
    return p;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"theorem-check", "bpsk-ook-5km",     "bpsk-ook-10km",
            "four-level-5km", "mixed-analog-5km", "ber-attenuation-sweep"};
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg = base_link_config();
    cfg.name = name;

    if (name == "theorem-check") {
        use_ideal_modulator(cfg);
        PayloadConfig analog;
        analog.kind = PayloadKind::Analog;
        analog.analog_frequency_hz = 0.0;  // random band-limited
        analog.analog_bandwidth_hz = 3.5e9;
        cfg.tx.payloads = {digital_payload(PayloadKind::Bpsk, 0x5a), analog, analog};
        cfg.metrics.reconstruction = true;
        cfg.metrics.sinad = false;
        cfg.seed.value = 20260808;
        return cfg;
    }
    if (name == "bpsk-ook-5km" || name == "bpsk-ook-10km") {
        use_physical_mzm(cfg);
        cfg.tx.payloads = {digital_payload(PayloadKind::Bpsk, 0x5a),
                           digital_payload(PayloadKind::Bpsk, 0x33),
                           digital_payload(PayloadKind::Ook, 0x71)};
        cfg.tx.segments = 150;  // > 300k decided bits per channel
        cfg.channel.fiber_enabled = true;
        cfg.channel.fiber.length_km = (name == "bpsk-ook-10km") ? 10.0 : 5.0;
        cfg.channel.bpf_enabled = true;
        cfg.channel.normalize_at_receiver = true;
        cfg.channel.amp_enabled = true;
        cfg.channel.amp.noise_power = 1e-4;
        cfg.metrics.eye = true;
        cfg.seed.value = 31415926;
        return cfg;
    }
    if (name == "four-level-5km") {
        use_physical_mzm(cfg);
        cfg.tx.payloads = {digital_payload(PayloadKind::FourLevelBpsk, 0x5a),
                           digital_payload(PayloadKind::FourLevelBpsk, 0x33),
                           digital_payload(PayloadKind::FourLevelBpsk, 0x71)};
        cfg.tx.segments = 80;  // 2 bits/symbol
        cfg.channel.fiber_enabled = true;
        cfg.channel.fiber.length_km = 5.0;
        cfg.channel.bpf_enabled = true;
        cfg.channel.normalize_at_receiver = true;
        cfg.channel.amp_enabled = true;
        cfg.channel.amp.noise_power = 1e-4;
        cfg.metrics.eye = true;
        cfg.seed.value = 27182818;
        return cfg;
    }
    if (name == "mixed-analog-5km") {
        use_physical_mzm(cfg);
        PayloadConfig analog;
        analog.kind = PayloadKind::Analog;
        analog.analog_frequency_hz = 2e9;
        analog.analog_amplitude = 1.0;
        cfg.tx.payloads = {digital_payload(PayloadKind::Bpsk, 0x5a),
                           digital_payload(PayloadKind::Ook, 0x33), analog};
        cfg.tx.segments = 150;
        cfg.channel.fiber_enabled = true;
        cfg.channel.fiber.length_km = 5.0;
        cfg.channel.bpf_enabled = true;
        cfg.channel.normalize_at_receiver = true;
        cfg.metrics.eye = true;
        cfg.seed.value = 16180339;
        return cfg;
    }
    if (name == "ber-attenuation-sweep") {
        use_physical_mzm(cfg);
        cfg.tx.payloads = {digital_payload(PayloadKind::Bpsk, 0x5a),
                           digital_payload(PayloadKind::Bpsk, 0x33),
                           digital_payload(PayloadKind::Ook, 0x71)};
        cfg.tx.equal_average_power = true;
        cfg.tx.segments = 50;
        cfg.channel.fiber_enabled = true;
        cfg.channel.fiber.length_km = 5.0;
        cfg.channel.bpf_enabled = true;
        cfg.channel.normalize_at_receiver = true;
        cfg.channel.voa_enabled = true;
        cfg.channel.amp_enabled = true;
        cfg.channel.amp.noise_power = 0.1;
        cfg.seed.value = 14142135;
        return cfg;
    }
    throw ConfigError("unknown preset: " + name);
}

} // namespace sincmux
