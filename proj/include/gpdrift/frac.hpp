#pragma once

#include "gpdrift/frac/cross_inner.hpp"
#include "gpdrift/frac/derivative.hpp"
#include "gpdrift/frac/gamma.hpp"
#include "gpdrift/frac/grid_function.hpp"
#include "gpdrift/frac/integral.hpp"
#include "gpdrift/frac/power_kernel.hpp"
#include "gpdrift/frac/properties.hpp"
