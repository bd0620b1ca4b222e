#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace sincmux {

/// Root seed for every stochastic operation. Identical seeds give
/// bit-identical draws on every platform and every run.
struct RngSeed {
    std::uint64_t value = 0;
};

/// Derive an independent stream seed for a call site. `label` names the
/// consumer ("awgn", "payload", ...); `index` separates repeated uses.
RngSeed derive_seed(RngSeed root, std::string_view label, std::uint64_t index = 0);

/// Deterministic 64-bit generator (splitmix64) with Box-Muller gaussians.
/// No standard-library distributions are used, so the stream does not
/// depend on the C++ runtime in use.
class RandomStream {
public:
    explicit RandomStream(RngSeed seed) : state_(seed.value) {}

    std::uint64_t next_u64();
    double uniform();   // [0, 1)
    double gaussian();  // standard normal

    /// Circularly symmetric complex gaussian with total variance `variance`
    /// (each quadrature carries variance/2).
    std::complex<double> complex_gaussian(double variance);

private:
    std::uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sincmux
