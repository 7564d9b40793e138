#pragma once

#include "gpdrift/experiments/config.hpp"
#include "gpdrift/experiments/output.hpp"
#include "gpdrift/experiments/parallel.hpp"
#include "gpdrift/experiments/report.hpp"
#include "gpdrift/experiments/runners.hpp"
