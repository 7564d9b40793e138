#pragma once

#include "gpdrift/weights/solvers.hpp"
#include "gpdrift/weights/weight_function.hpp"
