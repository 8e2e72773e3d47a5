#pragma once

#include "probcal/datagen.hpp"
#include "probcal/errors.hpp"
#include "probcal/format.hpp"
#include "probcal/inference.hpp"
#include "probcal/io.hpp"
#include "probcal/matching.hpp"
#include "probcal/metrics.hpp"
#include "probcal/model.hpp"
#include "probcal/report.hpp"
#include "probcal/svg.hpp"
#include "probcal/temperature.hpp"
#include "probcal/types.hpp"
