#pragma once

// Umbrella header: pulls in the whole toolkit.

#include "skg/amplify.hpp"
#include "skg/bits.hpp"
#include "skg/config.hpp"
#include "skg/dataset.hpp"
#include "skg/detrend.hpp"
#include "skg/errors.hpp"
#include "skg/leakage.hpp"
#include "skg/nist.hpp"
#include "skg/pipeline.hpp"
#include "skg/polar.hpp"
#include "skg/prng.hpp"
#include "skg/quantize.hpp"
#include "skg/report.hpp"
#include "skg/series.hpp"
#include "skg/sha256.hpp"
#include "skg/simulate.hpp"
#include "skg/stats.hpp"
#include "skg/version.hpp"
