#pragma once

// Umbrella header for the sinc-pulse-sequence multiplexing simulator.

#include "sincmux/channel.hpp"
#include "sincmux/comb.hpp"
#include "sincmux/errors.hpp"
#include "sincmux/experiment.hpp"
#include "sincmux/metrics.hpp"
#include "sincmux/rng.hpp"
#include "sincmux/rxchain.hpp"
#include "sincmux/spectral.hpp"
#include "sincmux/synth.hpp"
#include "sincmux/txchain.hpp"
#include "sincmux/waveform.hpp"
