#pragma once

#include "nugate/analytics.hpp"
#include "nugate/errors.hpp"
#include "nugate/grover.hpp"
#include "nugate/ising.hpp"
#include "nugate/nonunitary.hpp"
#include "nugate/rng.hpp"
#include "nugate/sigma.hpp"
#include "nugate/state_vector.hpp"
