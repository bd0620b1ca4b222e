#pragma once

#include <stdexcept>

namespace sincmux {

/// Rejected numeric or structural input (non-finite samples, malformed data).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration (grid mismatch, band outside Nyquist range, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Comb calibration could not reach the requested flatness.
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sincmux
