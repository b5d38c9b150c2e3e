#pragma once

#include "rwdre/analytic_speeds.hpp"
#include "rwdre/cli.hpp"
#include "rwdre/env_model.hpp"
#include "rwdre/error.hpp"
#include "rwdre/lattice_sim.hpp"
#include "rwdre/oracle.hpp"
#include "rwdre/series.hpp"
