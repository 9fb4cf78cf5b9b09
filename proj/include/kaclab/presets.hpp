#pragma once

// Initial data of the five reference experiments.

#include "kaclab/field.hpp"

namespace kaclab {

inline constexpr int kPresetCount = 5;

/// f0(v) of preset k in 1..5.
double preset_value(int k, double v);

/// Cellwise evaluation of preset k on the grid centers.
DistributionState<double> preset_initial(int k, const VelocityGrid<double>& grid);

/// Default horizon of preset k.
double preset_default_t_end(int k);

/// One-line description of preset k.
const char* preset_description(int k);

}  // namespace kaclab
