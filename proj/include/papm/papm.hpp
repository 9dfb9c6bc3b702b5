#pragma once

#include "papm/errors.hpp"
#include "papm/fit.hpp"
#include "papm/ggd.hpp"
#include "papm/grid_map.hpp"
#include "papm/io.hpp"
#include "papm/loss.hpp"
#include "papm/metrics.hpp"
#include "papm/ot.hpp"
#include "papm/perturb.hpp"
#include "papm/point_set.hpp"
#include "papm/transport_cost.hpp"
