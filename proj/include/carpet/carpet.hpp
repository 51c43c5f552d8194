#pragma once

#include "carpet/config.hpp"
#include "carpet/model.hpp"
#include "carpet/moran.hpp"
#include "carpet/optimizer.hpp"
#include "carpet/percolation.hpp"
#include "carpet/report.hpp"
#include "carpet/rng.hpp"
#include "carpet/roots.hpp"
#include "carpet/sampler.hpp"
#include "carpet/svg.hpp"
