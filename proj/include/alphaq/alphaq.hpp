#pragma once

// Umbrella header for the alphaq library.

#include "alphaq/errors.hpp"
#include "alphaq/experiment.hpp"
#include "alphaq/format.hpp"
#include "alphaq/moments.hpp"
#include "alphaq/panel.hpp"
#include "alphaq/parallel.hpp"
#include "alphaq/regression.hpp"
#include "alphaq/report_json.hpp"
#include "alphaq/rng.hpp"
#include "alphaq/rolling.hpp"
#include "alphaq/selfcheck.hpp"
#include "alphaq/simulate.hpp"
#include "alphaq/statistics.hpp"
