#pragma once

#include "liees/analysis.hpp"
#include "liees/chenfliess.hpp"
#include "liees/costs.hpp"
#include "liees/dither.hpp"
#include "liees/error.hpp"
#include "liees/jet.hpp"
#include "liees/lie.hpp"
#include "liees/sim.hpp"
#include "liees/system.hpp"
