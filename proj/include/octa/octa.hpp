#pragma once

#include "octa/rational.hpp"
#include "octa/field.hpp"
#include "octa/linalg.hpp"
#include "octa/slope.hpp"
#include "octa/subperiod.hpp"
#include "octa/determination.hpp"
#include "octa/geometry.hpp"
#include "octa/tiling.hpp"
#include "octa/coincidence.hpp"
#include "octa/flips.hpp"
#include "octa/staircase.hpp"
#include "octa/io.hpp"
