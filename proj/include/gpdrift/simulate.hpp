#pragma once

#include "gpdrift/simulate/drift.hpp"
#include "gpdrift/simulate/refine.hpp"
#include "gpdrift/simulate/rng.hpp"
#include "gpdrift/simulate/sample_path.hpp"
