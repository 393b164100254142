#pragma once

#include "occsel/rng.hpp"

namespace occsel {

// Draw from N(mean, 1) restricted to (lower, inf).
double rtnorm_lower(RngStream& rng, double mean, double lower);

// Draw from N(mean, 1) restricted to (-inf, upper].
double rtnorm_upper(RngStream& rng, double mean, double upper);

}  // namespace occsel
