#pragma once

#include "lsero/bootstrap.hpp"
#include "lsero/config.hpp"
#include "lsero/error.hpp"
#include "lsero/exact_sum.hpp"
#include "lsero/grid_io.hpp"
#include "lsero/landslide.hpp"
#include "lsero/montecarlo.hpp"
#include "lsero/pipeline.hpp"
#include "lsero/raster.hpp"
#include "lsero/report.hpp"
#include "lsero/rng.hpp"
#include "lsero/rusle.hpp"
#include "lsero/stats.hpp"
#include "lsero/synthetic.hpp"
#include "lsero/terrain.hpp"
#include "lsero/version.hpp"
