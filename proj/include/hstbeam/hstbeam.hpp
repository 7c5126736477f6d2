#pragma once

// Umbrella header for the mmWave high-speed-rail beam searching library.

#include "hstbeam/common.hpp"
#include "hstbeam/rng.hpp"
#include "hstbeam/geometry.hpp"
#include "hstbeam/channel.hpp"
#include "hstbeam/codebook.hpp"
#include "hstbeam/measurement.hpp"
#include "hstbeam/bandit.hpp"
#include "hstbeam/baselines.hpp"
#include "hstbeam/regret.hpp"
#include "hstbeam/scenario.hpp"
#include "hstbeam/config_io.hpp"
#include "hstbeam/csv.hpp"
#include "hstbeam/sim.hpp"
