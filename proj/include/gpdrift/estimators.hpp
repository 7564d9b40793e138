#pragma once

#include "gpdrift/estimators/estimate.hpp"
#include "gpdrift/estimators/stats.hpp"
