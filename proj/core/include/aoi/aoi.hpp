#pragma once

#include "aoi/error.hpp"
#include "aoi/inversion.hpp"
#include "aoi/kernels.hpp"
#include "aoi/optimize.hpp"
#include "aoi/report.hpp"
#include "aoi/service_distribution.hpp"
#include "aoi/simulator.hpp"
#include "aoi/stationary.hpp"
