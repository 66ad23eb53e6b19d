#pragma once

#include "schelling/experiments.hpp"
#include "schelling/graph.hpp"
#include "schelling/metrics.hpp"
#include "schelling/model.hpp"
#include "schelling/plots.hpp"
#include "schelling/report.hpp"
#include "schelling/run.hpp"
#include "schelling/spectral.hpp"
