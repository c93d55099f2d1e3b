#pragma once

#include "piotrowski/analysis.hpp"
#include "piotrowski/binning.hpp"
#include "piotrowski/dataset.hpp"
#include "piotrowski/diagnostics.hpp"
#include "piotrowski/errors.hpp"
#include "piotrowski/glm.hpp"
#include "piotrowski/report.hpp"
#include "piotrowski/synthetic.hpp"
