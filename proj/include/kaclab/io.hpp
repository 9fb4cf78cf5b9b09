#pragma once

// CSV and JSON persistence of states, time series and run summaries.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kaclab/analysis.hpp"
#include "kaclab/equilibrium.hpp"
#include "kaclab/field.hpp"
#include "kaclab/moments.hpp"
#include "kaclab/timeseries.hpp"

namespace kaclab {

using Json = nlohmann::ordered_json;

/// Full-precision decimal rendering (17 significant digits).
std::string format_real(double x);

/// Header `v,f`, one row per cell center.
void write_profile_csv(const std::filesystem::path& path, const DistributionState<double>& state);
std::string profile_csv(const DistributionState<double>& state);

/// Reads a `v,f` table with strictly increasing v and nonnegative f.
std::vector<std::pair<double, double>> read_profile_table(const std::filesystem::path& path);

/// Piecewise-linear interpolation of a table onto the grid centers, zero outside its range.
DistributionState<double> interpolate_profile(const std::vector<std::pair<double, double>>& table,
                                              const VelocityGrid<double>& grid);

/// Column names of the time-series CSV, in order.
const std::vector<std::string>& timeseries_columns();
std::string timeseries_csv(const TimeSeries<double>& series);

Json to_json(const MomentSet<double>& ms);
Json to_json(const BoseParameters<double>& p);
Json to_json(const SmallnessReport<double>& r);
Json to_json(const DecayFit<double>& fit);
Json to_json(const CheckResult<double>& c);
Json to_json(const MonitorReport<double>& report);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace kaclab
