#pragma once

#include <filesystem>

#include "sincmux/txchain.hpp"

namespace sincmux {

enum class FilterDomain {
    LowpassBaseband,   ///< detect first, then lowpass of cutoff line_spacing/2
    BandpassAtCarrier, ///< bandpass of width line_spacing around 0, then detect
};

/// Receiver settings for one demultiplexed channel.
struct RxConfig {
    int target_shift = 0;                  ///< l in [0, N)
    FilterDomain filter_domain = FilterDomain::LowpassBaseband;
    double lo_phase_error = 0.0;           ///< rad
    double clock_phase_error = 0.0;        ///< fraction of delta_t
    bool rescale_by_n = true;              ///< undo the 1/N demux factor

    void validate(int n_channels) const;
};

/// Demultiplexed channel: the filtered waveform plus the sampling instants
/// t_s = l*delta_t + m*N*delta_t and the values read there.
struct DemuxResult {
    Waveform filtered;
    std::vector<std::int64_t> instant_index;  ///< m
    std::vector<double> sample_instants;      ///< t_s, s
    std::vector<cdouble> sample_values;
};

/// Multiply-then-filter demultiplexer: the received waveform is multiplied
/// by the locally generated sequence with the target shift (clock phase
/// error shifts the local sequence) and confined to the channel band by the
/// rectangular filter.
Waveform demultiplex(const Waveform& s, const SincSequenceSpec& spec, const RxConfig& cfg);

/// Local-oscillator rotation onto complex electrical baseband;
/// identity at zero phase error.
Waveform coherent_detect(const Waveform& w, double lo_phase_error);

/// Reads the demultiplexed waveform at the sampling instants. The first and
/// last `edge_exclude_periods` sequence periods are skipped; values are
/// multiplied by N when cfg.rescale_by_n is set.
DemuxResult extract_samples(const Waveform& x, const SincSequenceSpec& spec,
                            const RxConfig& cfg, std::uint64_t edge_exclude_periods = 1);

/// Rebuilds the continuous channel from the extracted sampling points via
/// sinc interpolation at rate 1/(N delta_t). Requires a complete uniform
/// sample set (edge_exclude_periods = 0). Must agree with the filtered
/// demux waveform itself; the pair forms the dual-route reconstruction check.
Waveform reconstruct_channel(const DemuxResult& res, const SincSequenceSpec& spec,
                             const Grid& grid);

struct DecisionResult {
    std::vector<double> levels;       ///< decided constellation levels
    std::vector<std::uint8_t> bits;   ///< mapped bits (Gray for 4-level)
};

/// Nearest-level decision. Phase kinds decide on the real part, intensity
/// kinds on |value|^2 with the threshold at the midpoint of the rail means.
/// Ties break toward the lower level.
DecisionResult decide_symbols(const std::vector<cdouble>& values, PayloadKind kind);

/// Bits for known transmitted levels (the mapping decide_symbols inverts).
std::vector<std::uint8_t> symbols_to_bits(const std::vector<double>& levels, PayloadKind kind);

void write_demux_csv(const std::filesystem::path& file, const DemuxResult& res);

} // namespace sincmux
