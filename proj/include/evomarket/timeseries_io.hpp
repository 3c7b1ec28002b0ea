#pragma once

// Delimited time-series files:
//
//   # evomarket.timeseries/1
//   t,tau,mean_price,mean_fitness,mean_gamma,regime,y_t,s_t,y_0,mu_0,f_0,y_1,...
//
// one row per snapshot, numbers in shortest round-trip decimal form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "evomarket/market_core.hpp"

namespace evomarket {

inline constexpr std::string_view kTimeSeriesVersion = "evomarket.timeseries/1";

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

std::vector<std::string> timeseries_header(std::size_t brand_count);

void write_timeseries(std::ostream& out, const Trajectory& trajectory);
std::string timeseries_csv(const Trajectory& trajectory);
void save_timeseries(const std::filesystem::path& path, const Trajectory& trajectory);

/// Parsed file. The regime column reads as 1 (Stable) or 0 (Unstable).
struct TimeSeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::size_t brand_count = 0;

  /// Throws Error(InvalidParameter) for an unknown column.
  std::vector<double> column(std::string_view name) const;
};

/// Throws Error(ScenarioFormat) on a missing or different version line, a bad
/// header, ragged rows, unparsable numbers or non-increasing t.
TimeSeriesTable read_timeseries(std::istream& in);
TimeSeriesTable load_timeseries(const std::filesystem::path& path);

/// Rebuilds a trajectory from a parsed file. Price deviations are taken about
/// the recorded mean price and growth rates as f_i - <f>.
Trajectory trajectory_from_table(const TimeSeriesTable& table);

}  // namespace evomarket
