#pragma once

#include <string>
#include <vector>

#include "tising/sweep.hpp"

namespace tising {

enum class PlotMetric { recovery_rate, success_fraction };

/// Fixed-canvas line plot of a metric against α with one polyline per p.
/// Output depends only on the input rows.
std::string render_sweep_svg(const std::vector<SweepRow>& rows, PlotMetric metric);

} // namespace tising
