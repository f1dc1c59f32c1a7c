#pragma once

// Umbrella header: everything needed to drive the laboratory from code.

#include "bfl/chaos.hpp"
#include "bfl/config.hpp"
#include "bfl/dirichlet.hpp"
#include "bfl/experiments.hpp"
#include "bfl/glauber.hpp"
#include "bfl/io.hpp"
#include "bfl/measure.hpp"
#include "bfl/operators.hpp"
#include "bfl/rng.hpp"
#include "bfl/semigroup.hpp"
#include "bfl/weight.hpp"
