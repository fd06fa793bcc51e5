#pragma once

#include "lievio/errors.hpp"
#include "lievio/lie_group.hpp"
#include "lievio/dynamics.hpp"
#include "lievio/measurements.hpp"
#include "lievio/riccati.hpp"
#include "lievio/observer.hpp"
#include "lievio/observability.hpp"
#include "lievio/sim.hpp"
#include "lievio/euroc.hpp"
