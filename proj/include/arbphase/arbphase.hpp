#pragma once

// Arbitrage phase transitions in random one-period markets priced under
// heterogeneous local measures: instance sampling, an LP-based zero-vs-
// infinite arbitrage-volume detector with an independent hull oracle, the
// analytic critical-line solver, and Monte Carlo phase-diagram sweeps.

#include "arbphase/detect.hpp"
#include "arbphase/half_moments.hpp"
#include "arbphase/hull_oracle.hpp"
#include "arbphase/io/csv.hpp"
#include "arbphase/io/json.hpp"
#include "arbphase/io/svg.hpp"
#include "arbphase/market.hpp"
#include "arbphase/matrix.hpp"
#include "arbphase/rng.hpp"
#include "arbphase/saddle.hpp"
#include "arbphase/simplex.hpp"
#include "arbphase/sweep.hpp"
