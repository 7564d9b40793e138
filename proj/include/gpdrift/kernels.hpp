#pragma once

#include "gpdrift/kernels/increment_covariance.hpp"
#include "gpdrift/kernels/noise_model.hpp"
#include "gpdrift/kernels/spd_factor.hpp"
#include "gpdrift/kernels/time_grid.hpp"
