#pragma once

#include <map>
#include <string>

#include "sincmux/channel.hpp"
#include "sincmux/metrics.hpp"
#include "sincmux/rxchain.hpp"

namespace sincmux {

/// Payload definition as read from config files.
struct PayloadConfig {
    PayloadKind kind = PayloadKind::Bpsk;
    double symbol_rate = 4e9;          ///< digital kinds, baud
    std::uint8_t prbs_seed = 0x7f;     ///< digital kinds
    double analog_frequency_hz = 2e9;  ///< Analog: tone frequency (0 = random band-limited)
    double analog_amplitude = 1.0;
    double analog_bandwidth_hz = 0.0;  ///< Analog with random payload: band
};

struct TxSection {
    TxPlan plan;
    std::vector<PayloadConfig> payloads;
    MzmModel modulator;
    double carrier_power = 1.0;
    PulseShaping shaping = PulseShaping::BrickWall;
    NyquistStrictness strictness = NyquistStrictness::Error;
    bool equal_average_power = false;  ///< scale intensity payloads to BPSK mean power
    int oversampling = 16;             ///< M; sample rate = M * N * delta_f
    std::uint64_t periods_per_segment = 4096;
    int segments = 1;
};

struct ChannelSection {
    bool fiber_enabled = false;
    FiberSpec fiber;
    bool bpf_enabled = false;
    double bpf_width_hz = 125e9;  ///< amplifier band-pass, transparent by default
    bool voa_enabled = false;
    VoaSpec voa;
    bool amp_enabled = false;
    AmpSpec amp;
    bool normalize_at_receiver = false;  ///< unit mean power ahead of the VOA
};

struct RxSection {
    FilterDomain filter_domain = FilterDomain::LowpassBaseband;
    double lo_phase_error = 0.0;
    double clock_phase_error = 0.0;
    bool rescale_by_n = true;
    std::uint64_t edge_exclude_periods = 1;
};

struct MetricsSection {
    bool evm = true;
    bool ber = true;
    bool eye = false;
    bool psd = false;
    bool sinad = true;           ///< analog channels
    bool reconstruction = false; ///< raw N*x_l vs payload interior error
    std::size_t eye_time_bins = 64;
    std::size_t eye_amplitude_bins = 64;
    double psd_rbw_hz = 0.0;  ///< 0 = auto (64 bins over the grid)
    EvmNormalization evm_normalization = EvmNormalization::AvgPower;
};

struct ExperimentConfig {
    std::string name = "experiment";
    TxSection tx;
    ChannelSection channel;
    RxSection rx;
    MetricsSection metrics;
    RngSeed seed;
    std::string output_dir;  ///< empty = no artifact files

    void validate() const;
};

struct ChannelResult {
    PayloadKind kind = PayloadKind::Bpsk;
    MetricsReport metrics;
};

struct ExperimentResult {
    std::vector<ChannelResult> channels;
    std::string report_json;  ///< the serialized report as written to disk
};

/// Config (de)serialization. The JSON dialect accepts // comments on input.
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string serialize_experiment_config(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

/// Runs tx -> channel -> rx -> metrics for every channel, accumulating
/// segments; writes report and artifact files when output_dir is set.
/// Deterministic under cfg.seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

enum class SweepVariable { VoaAttenuation, FiberLength, NoisePower, ClockPhaseError };

const char* sweep_variable_name(SweepVariable v);
SweepVariable sweep_variable_from_name(const std::string& name);

struct SweepSpec {
    SweepVariable variable = SweepVariable::VoaAttenuation;
    std::vector<double> values;
    int repetitions = 1;
    int workers = 1;

    void validate() const;
};

struct SweepPoint {
    double value = 0.0;
    std::vector<ChannelResult> channels;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::string table_csv;
};

/// One experiment per sweep value with seeds derived per point; points may
/// run on a small worker pool, output is independent of scheduling.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep);

/// Built-in experiment configurations.
/// Names: theorem-check, bpsk-ook-5km, bpsk-ook-10km, four-level-5km,
/// mixed-analog-5km, ber-attenuation-sweep.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace sincmux
