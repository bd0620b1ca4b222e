#pragma once

#include <cstdint>
#include <vector>

#include "sincmux/comb.hpp"
#include "sincmux/synth.hpp"

namespace sincmux {

enum class PayloadKind { Ook, Bpsk, FourLevelBpsk, Analog };

enum class PulseShaping {
    BrickWall,  ///< sinc interpolation at the symbol rate; band-exact
    Nrz,        ///< rectangular hold; marginal under the Nyquist bound
};

/// Per-channel source signal. Digital kinds carry real symbol levels;
/// Analog carries a waveform already on (or compatible with) the link grid.
struct ChannelPayload {
    PayloadKind kind = PayloadKind::Bpsk;
    double symbol_rate = 0.0;            ///< baud, digital kinds
    std::vector<double> symbols;         ///< OOK {0,1}; BPSK {-1,+1}; 4-level {-1,-1/3,+1/3,+1}
    Waveform analog_waveform;            ///< Analog kind
    double baseband_limit_hz = 0.0;      ///< declared band; must respect B/(2N)

    void validate() const;
};

/// PRBS-7 generator state: x^7 + x^6 + 1, period 127.
struct PrbsSpec {
    std::uint8_t seed = 0x7f;  ///< nonzero 7-bit state

    void validate() const;
};

/// Generates n_bits from the LFSR; deterministic, period exactly 127.
std::vector<std::uint8_t> prbs7(const PrbsSpec& spec, std::size_t n_bits);

/// Running LFSR for streams that continue across window segments.
class Prbs7Stream {
public:
    explicit Prbs7Stream(PrbsSpec spec);
    std::uint8_t next_bit();

private:
    std::uint8_t state_;
};

enum class ModulatorMode { IdealMultiplier, PhysicalMzm };

/// Modulator model. IdealMultiplier maps drive to field linearly
/// (field = sqrt(P) * drive_scale * drive); PhysicalMzm applies the cosine
/// transfer field = sqrt(P) * cos(pi (drive*drive_scale + bias) / (2 v_pi)).
struct MzmModel {
    double v_pi = 1.0;        ///< volts
    double bias = 0.5;        ///< volts
    double drive_scale = 1.0; ///< dimensionless
    ModulatorMode mode = ModulatorMode::IdealMultiplier;

    void validate() const;
};

enum class TxArchitecture { SingleModulator, CascadedModulators };

/// Transmit plan: N channels on line spacing delta_f, driven by
/// n = (N-1)/2 RF tones at k*delta_f with per-channel phase step 2 pi / N.
struct TxPlan {
    int n_channels = 3;
    double line_spacing_hz = 0.0;  ///< delta_f
    TxArchitecture architecture = TxArchitecture::SingleModulator;

    int rf_tone_count() const { return (n_channels - 1) / 2; }
    double rf_tone_hz(int k) const { return k * line_spacing_hz; }       ///< k in 1..n
    double channel_phase(int l) const;                                   ///< l * 2 pi / N
    double sequence_bandwidth_hz() const { return n_channels * line_spacing_hz; }
    SincSequenceSpec sequence_spec(int l) const;

    void validate() const;
};

enum class NyquistStrictness { Error, WarnOnly };

/// Maps a payload onto the grid. Digital symbols are pulse-shaped; analog
/// payloads must already match the grid. Throws ConfigError when shaped
/// energy escapes baseband_limit_hz and strictness is Error.
Waveform shape_payload(const ChannelPayload& payload, const Grid& grid,
                       PulseShaping shaping = PulseShaping::BrickWall,
                       NyquistStrictness strictness = NyquistStrictness::Error);

/// The single-modulator electrical network: each channel multiplied with the
/// phase-shifted RF tone set plus DC, all channels summed. Modulating an
/// ideal carrier with this drive yields channel-by-channel time-interleaved
/// sinc-sequence sampling. Weights: DC 1, each tone 2 (the drive equals
/// N * sum_l s_l(t) seq_l(t)).
Waveform build_drive_signal(const std::vector<Waveform>& payload_waveforms,
                            const TxPlan& plan, const Grid& grid);

/// Applies the modulator transfer to a real drive at the given carrier power.
Waveform modulate(double carrier_power, const Waveform& drive, const MzmModel& model);

struct CombCalibration {
    double bias = 0.0;
    double drive_scale = 0.0;
    double flatness_db = 0.0;   ///< max-min line power over the target lines
    double spur_fraction = 0.0; ///< out-of-band line power / in-band line power
};

/// Derivative-free search for the (bias, drive_scale) operating point whose
/// n-tone-driven comb is flat across the N target lines. Deterministic:
/// coarse 64x64 scan plus zoomed refinement passes. Throws CalibrationError
/// when no point reaches 1 dB flatness.
CombCalibration calibrate_comb(const MzmModel& model, int n_tones, int target_lines);

/// Exact multiplexer: sum_l payload_l(t) * seq_l(t) with the shifted
/// sequence per channel; output band is confined to half the comb bandwidth.
Waveform multiplex(const std::vector<Waveform>& payload_waveforms,
                   const std::vector<SincSequenceSpec>& specs);

struct RatePlan {
    double per_channel_baud = 0.0;
    double combined_baud = 0.0;
    double optical_bandwidth_hz = 0.0;
};

/// Transmittable symbol rate for a modulator of RF bandwidth bm_hz:
/// the single-modulator architecture reaches a combined rate of bm_hz
/// (optical band 2*bm); cascaded pulse generation and sampling reach
/// N/(N-1) times that.
RatePlan plan_symbol_rate(TxArchitecture architecture, double bm_hz, int n_channels);

} // namespace sincmux
