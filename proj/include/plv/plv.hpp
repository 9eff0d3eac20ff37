#pragma once

// Umbrella header for the library (everything except the CLI layer).

#include "plv/errors.hpp"
#include "plv/expr.hpp"
#include "plv/geoequiv.hpp"
#include "plv/geometry.hpp"
#include "plv/hamflow.hpp"
#include "plv/jet.hpp"
#include "plv/metric.hpp"
#include "plv/ode.hpp"
#include "plv/quadint.hpp"
#include "plv/quadrature.hpp"
#include "plv/quantum.hpp"
#include "plv/random.hpp"
#include "plv/surface_jet.hpp"
