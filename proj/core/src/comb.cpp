#include "sincmux/comb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sincmux/errors.hpp"
#include "sincmux/synth.hpp"

namespace sincmux {

void SincSequenceSpec::validate() const {
    if (n_lines < 1 || n_lines % 2 == 0)
        throw ConfigError("sequence: line count must be odd and >= 1");
    if (!(bandwidth_hz > 0.0)) throw ConfigError("sequence: bandwidth must be > 0");
    if (shift_index < 0 || shift_index >= n_lines)
        throw ConfigError("sequence: shift index out of [0, N)");
}

double sequence_value(const SincSequenceSpec& spec, double t) {
    spec.validate();
    const int n = spec.harmonics();
    const double inv_n = 1.0 / static_cast<double>(spec.n_lines);
    // argument reduced modulo the period so far-out times stay exact
    const double tau = std::remainder(t - spec.shift_index * spec.delta_t(), spec.period());
    double acc = 0.5;
    for (int k = 1; k <= n; k++)
        acc += std::cos(2.0 * M_PI * k * spec.bandwidth_hz * tau * inv_n);
    return 2.0 * inv_n * acc;
}

int oversampling_of(const SincSequenceSpec& spec, const Grid& grid) {
    const double ratio = grid.sample_rate / spec.bandwidth_hz;
    const int m = static_cast<int>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-9)
        throw ConfigError("grid: delta_t must span a whole number of samples (rate = M*B)");
    if (grid.sample_rate < 2.0 * spec.bandwidth_hz)
        throw ConfigError("grid: sample rate below 2B would alias the comb");
    return m;
}

std::uint64_t periods_of(const SincSequenceSpec& spec, const Grid& grid) {
    const std::uint64_t samples_per_period =
        static_cast<std::uint64_t>(spec.n_lines) * static_cast<std::uint64_t>(oversampling_of(spec, grid));
    if (grid.length == 0 || grid.length % samples_per_period != 0)
        throw ConfigError("grid: window must cover a whole number of sequence periods");
    return grid.length / samples_per_period;
}

Grid sequence_grid(const SincSequenceSpec& spec, int oversampling, std::uint64_t periods,
                   double t0) {
    spec.validate();
    if (oversampling < 2) throw ConfigError("grid: oversampling must be >= 2");
    if (periods == 0) throw ConfigError("grid: need at least one period");
    Grid g;
    g.sample_rate = static_cast<double>(oversampling) * spec.bandwidth_hz;
    g.length = periods * static_cast<std::uint64_t>(spec.n_lines) *
               static_cast<std::uint64_t>(oversampling);
    g.t0 = t0;
    return g;
}

Waveform sequence_waveform(const SincSequenceSpec& spec, const Grid& grid) {
    spec.validate();
    const int m = oversampling_of(spec, grid);
    periods_of(spec, grid);

    // Integer-exact evaluation: sample i of the shift-l sequence depends only
    // on (i - l*M) mod N*M, so shifted sequences are exact sample rotations.
    const std::uint64_t nm = static_cast<std::uint64_t>(spec.n_lines) * static_cast<std::uint64_t>(m);
    const int n = spec.harmonics();
    const double inv_n = 1.0 / static_cast<double>(spec.n_lines);

    std::vector<double> one_period(nm);
    for (std::uint64_t u = 0; u < nm; u++) {
        double acc = 0.5;
        for (int k = 1; k <= n; k++)
            acc += std::cos(2.0 * M_PI * k * static_cast<double>(u) / static_cast<double>(nm));
        one_period[u] = 2.0 * inv_n * acc;
    }

    Waveform w = grid.zero();
    const std::uint64_t shift = static_cast<std::uint64_t>(spec.shift_index) * static_cast<std::uint64_t>(m);
    for (std::size_t i = 0; i < grid.length; i++) {
        const std::uint64_t u = (i + nm - (shift % nm)) % nm;
        w.samples[i] = cdouble{one_period[u], 0.0};
    }
    return w;
}

CombLines comb_lines(const SincSequenceSpec& spec) {
    spec.validate();
    CombLines comb;
    const int n = spec.harmonics();
    const double df = spec.line_spacing();
    const double inv_n = 1.0 / static_cast<double>(spec.n_lines);
    const double shift = spec.shift_index * spec.delta_t();
    comb.lines.reserve(spec.n_lines);
    for (int k = -n; k <= n; k++) {
        const double f = k * df;
        const double phase = -2.0 * M_PI * f * shift;
        comb.lines.push_back({f, std::polar(inv_n, phase)});
    }
    return comb;
}

void write_comb_csv(const std::filesystem::path& file, const CombLines& comb) {
    std::ofstream os(file);
    if (!os) throw InputError("cannot open for writing: " + file.string());
    os << "freq_hz,re,im\n";
    os.precision(17);
    for (const auto& line : comb.lines)
        os << line.frequency_hz << ',' << line.amplitude.real() << ',' << line.amplitude.imag()
           << '\n';
}

SquareMatrix orthogonality_matrix(int n_lines, double bandwidth_hz) {
    SquareMatrix mat;
    mat.n = static_cast<std::size_t>(n_lines);
    mat.a.assign(mat.n * mat.n, 0.0);
    for (int l = 0; l < n_lines; l++) {
        SincSequenceSpec spec{n_lines, bandwidth_hz, l};
        const double dt = spec.delta_t();
        for (int k = 0; k < n_lines; k++)
            mat.at(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) =
                sequence_value(spec, k * dt);
    }
    return mat;
}

double multiplication_theorem_residual(const SincSequenceSpec& spec, const Grid& grid) {
    spec.validate();
    if (spec.shift_index != 0)
        throw ConfigError("multiplication theorem: unshifted sequence expected");
    const int m = oversampling_of(spec, grid);
    const std::uint64_t p = periods_of(spec, grid);
    const std::uint64_t n_lines = static_cast<std::uint64_t>(spec.n_lines);

    // Dimensionless identity on the periodic window:
    //   seq(t) * psinc_P(B t / N) = psinc_{N P}(B t),
    // with t = i / (M B): arguments i/(N M) and i/M reduced per kernel period.
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.length; i++) {
        const double tau = static_cast<double>(i) / grid.sample_rate;
        const double u = static_cast<double>(i) / (static_cast<double>(n_lines) * m);
        const double v = static_cast<double>(i) / static_cast<double>(m);
        const double lhs = sequence_value(spec, tau) * periodic_sinc(u, p);
        const double rhs = periodic_sinc(v, n_lines * p);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

} // namespace sincmux
