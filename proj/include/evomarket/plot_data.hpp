#pragma once

// Plain delimited data for external plotting tools; no rendering here.

#include <cstddef>
#include <string>
#include <string_view>

#include "evomarket/demand.hpp"
#include "evomarket/market_core.hpp"

namespace evomarket {

enum class PlotKind { PricePath, DemandSupplyCurves, LogShareRatio, PriceHistogram };

std::string_view to_string(PlotKind kind);

/// Throws Error(InvalidParameter) naming every valid kind.
PlotKind parse_plot_kind(std::string_view name);

struct PlotOptions {
  DemandParams demand;          // demand curve for demand_supply_curves
  double adopter_fraction = 1.0;
  double mu_min = 0.0;          // price grid; mu_min >= mu_max picks the quadratic region
  double mu_max = 0.0;
  std::size_t grid_points = 201;
  std::size_t bins = 41;        // price_histogram
  std::size_t brand_a = 0;      // log_share_ratio
  std::size_t brand_b = 1;
};

/// price_path:            t, mean_price
/// demand_supply_curves:  mu, demand, supply at the last snapshot; a comment
///                        line gives the clearing price where <gamma> = 0
/// log_share_ratio:       t, ln(y_a / y_b)
/// price_histogram:       bin_center, count of every recorded deviation
/// Throws Error(InsufficientData) for an empty trajectory.
std::string emit_plot_data(const Trajectory& trajectory, PlotKind kind, const PlotOptions& options);

}  // namespace evomarket
