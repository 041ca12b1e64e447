#pragma once

//! Umbrella header for the whole library.

#include "rwde/dirichlet_moments.hpp"
#include "rwde/environment.hpp"
#include "rwde/errors.hpp"
#include "rwde/experiments.hpp"
#include "rwde/flow_constructor.hpp"
#include "rwde/io.hpp"
#include "rwde/maxflow.hpp"
#include "rwde/rng.hpp"
#include "rwde/special_functions.hpp"
#include "rwde/stationary.hpp"
#include "rwde/stats.hpp"
#include "rwde/torus.hpp"
#include "rwde/unit_flows.hpp"
#include "rwde/walk.hpp"
#include "rwde/weights.hpp"
