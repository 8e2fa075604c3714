#pragma once

// Umbrella header for the sphdec library: closest-point search in lattices
// and finite constellations with eight interchangeable engine variants,
// operation-count instrumentation, basis reduction, exhaustive reference
// searches, and reproducible measurement campaigns.

#include "sphdec/counting.hpp"
#include "sphdec/decoder.hpp"
#include "sphdec/errors.hpp"
#include "sphdec/experiments.hpp"
#include "sphdec/lll.hpp"
#include "sphdec/matrix.hpp"
#include "sphdec/oracle.hpp"
#include "sphdec/sampling.hpp"
#include "sphdec/triangular.hpp"
#include "sphdec/verification.hpp"
