#include "evomarket/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evomarket/error.hpp"

namespace evomarket {

DemandParams DemandParams::from(const MarketParams& params) {
  DemandParams d;
  d.alpha = params.alpha;
  d.d_max = params.d_max;
  d.mu_nat = params.mu_nat;
  return d;
}

void validate(const DemandParams& p) {
  require(std::isfinite(p.alpha) && p.alpha >= 0.0, ErrorKind::InvalidParameter,
          "demand.alpha must be >= 0");
  require(std::isfinite(p.d_max) && p.d_max > 0.0, ErrorKind::InvalidParameter,
          "demand.d_max must be > 0");
  require(std::isfinite(p.mu_nat) && p.mu_nat > 0.0, ErrorKind::InvalidParameter,
          "demand.mu_nat must be > 0");
  require(std::isfinite(p.bass_p) && p.bass_p >= 0.0, ErrorKind::InvalidParameter,
          "demand.bass_p must be >= 0");
  require(std::isfinite(p.bass_q) && p.bass_q >= 0.0, ErrorKind::InvalidParameter,
          "demand.bass_q must be >= 0");
  require(std::isfinite(p.seasonal_amplitude) && p.seasonal_amplitude >= 0.0 &&
              p.seasonal_amplitude < 1.0,
          ErrorKind::InvalidParameter, "demand.seasonal_amplitude must lie in [0, 1)");
  require(std::isfinite(p.seasonal_period) && p.seasonal_period > 0.0,
          ErrorKind::InvalidParameter, "demand.seasonal_period must be > 0");
}

double seasonal_factor(double t, const DemandParams& p) {
  if (p.seasonal_amplitude == 0.0) return 1.0;
  return 1.0 + p.seasonal_amplitude * std::sin(2.0 * std::numbers::pi * t / p.seasonal_period);
}

double demand_rate(double mean_price, double t, const DemandParams& p, double n) {
  const double offset = mean_price - p.mu_nat;
  const double raw = p.d_max * seasonal_factor(t, p) - p.alpha * offset * offset;
  return std::max(0.0, raw) * n;
}

bool in_quadratic_region(double mean_price, double t, const DemandParams& p) {
  const double offset = mean_price - p.mu_nat;
  return p.d_max * seasonal_factor(t, p) - p.alpha * offset * offset >= 0.0;
}

double demand_slope(double mean_price, double t, const DemandParams& p, double n) {
  require(in_quadratic_region(mean_price, t, p), ErrorKind::ClampedRegion,
          "demand slope is undefined where the demand rate is clamped at zero");
  // The seasonal factor scales d_m only, so the slope itself carries n alone.
  return -2.0 * p.alpha * (mean_price - p.mu_nat) * n;
}

double step_adopters(double n, double dt, const DemandParams& p) {
  const double rate = (p.bass_p + p.bass_q * n) * (1.0 - n);
  return std::clamp(n + rate * dt, n, 1.0);
}

double inventory_preference_mass(const MarketState& state) {
  double mass = 0.0;
  for (const auto& b : state.brands) mass += b.preference_eta * b.inventory_x;
  return mass;
}

double step_consumer_density(double psi, const MarketState& state, double demand, double dt_tau) {
  const double sales = inventory_preference_mass(state) * psi;
  return std::max(0.0, psi + (demand - sales) * dt_tau);
}

StationaryDensity stationary_consumer_density(const MarketState& state, double demand) {
  const double mass = inventory_preference_mass(state);
  require(mass > 0.0, ErrorKind::DegenerateMarket,
          "no inventory-preference mass: the market cannot transact");
  return {demand / mass, 1.0 / mass};
}

StationaryDensity stationary_consumer_density(const MarketState& state, const DemandParams& p) {
  return stationary_consumer_density(
      state, demand_rate(state.mean_price, state.time_t, p, state.adopter_fraction_n));
}

}  // namespace evomarket
