#pragma once

// Demand rate with a maximum at the natural price, first-purchase adoption
// and the consumer-density balance.

#include "evomarket/market_core.hpp"

namespace evomarket {

struct DemandParams {
  double alpha = 2.0;
  double d_max = 1.0;
  double mu_nat = 1.0;
  double bass_p = 0.03;  // innovation coefficient
  double bass_q = 0.38;  // imitation coefficient
  double seasonal_amplitude = 0.0;
  double seasonal_period = 1.0;

  static DemandParams from(const MarketParams& params);

  bool operator==(const DemandParams&) const = default;
};

void validate(const DemandParams& params);

/// Multiplier 1 + A sin(2 pi t / T) applied to the maximum demand rate.
double seasonal_factor(double t, const DemandParams& params);

/// n * max(0, d_m(t) - alpha (mean_price - mu_nat)^2).
double demand_rate(double mean_price, double t, const DemandParams& params, double adopter_fraction);

/// True while the quadratic expansion is non-negative (no clamping).
bool in_quadratic_region(double mean_price, double t, const DemandParams& params);

/// d(demand)/d(price) = -2 alpha (mean_price - mu_nat) n. Throws
/// Error(ClampedRegion) outside the quadratic region.
double demand_slope(double mean_price, double t, const DemandParams& params, double adopter_fraction);

/// One explicit Euler step of dn/dt = (p + q n)(1 - n), clamped to [0, 1].
double step_adopters(double adopter_fraction, double dt, const DemandParams& params);

/// Inventory-preference mass sum_i eta_i x_i.
double inventory_preference_mass(const MarketState& state);

/// One explicit Euler step of d psi / d tau = d - psi sum_i eta_i x_i, clamped at 0.
double step_consumer_density(double psi, const MarketState& state, double demand, double dt_tau);

struct StationaryDensity {
  double psi_s = 0.0;
  double implied_psi0 = 0.0;  // 1 / sum_i eta_i x_i
};

/// psi_S = d / sum_i eta_i x_i. Throws Error(DegenerateMarket) when the
/// inventory-preference mass is zero.
StationaryDensity stationary_consumer_density(const MarketState& state, double demand);

/// Same, with the demand evaluated at the state's mean price and adopter
/// fraction.
StationaryDensity stationary_consumer_density(const MarketState& state, const DemandParams& params);

}  // namespace evomarket
