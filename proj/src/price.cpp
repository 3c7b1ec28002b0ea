#include "evomarket/price.hpp"

#include <algorithm>
#include <cmath>

#include "evomarket/error.hpp"
#include "evomarket/supply.hpp"

namespace evomarket {

namespace {

constexpr double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Exact flow of d(dmu)/dtau = -b sign(dmu) over dt: it reaches zero and stays.
double restoring_flow(double x, double b, double dt) {
  if (x > 0.0) return std::max(0.0, x - b * dt);
  if (x < 0.0) return std::min(0.0, x + b * dt);
  return 0.0;
}

}  // namespace

void validate(const NoiseModel& noise) {
  require(std::isfinite(noise.amplitude_D) && noise.amplitude_D >= 0.0,
          ErrorKind::InvalidParameter, "noise amplitude D must be >= 0");
  require(std::isfinite(noise.response_b) && noise.response_b > 0.0,
          ErrorKind::InvalidParameter, "price response b must be > 0");
}

double restoring_force(double delta_mu, Regime regime, double response_b) {
  const double s = sign(delta_mu);
  return regime == Regime::Stable ? -response_b * s : response_b * s;
}

double langevin_step(double delta_mu, const NoiseModel& noise, Regime regime, double dt_tau,
                     Rng& rng, LangevinScheme scheme) {
  const double D = noise.amplitude_D;
  const double b = noise.response_b;
  if (scheme == LangevinScheme::EulerMaruyama) {
    double next = delta_mu + restoring_force(delta_mu, regime, b) * dt_tau;
    if (D > 0.0) next += std::sqrt(D * dt_tau) * rng.normal();
    return next;
  }
  if (scheme == LangevinScheme::Exact && D > 0.0) {
    const double var = D * dt_tau;
    const double z = (regime == Regime::Stable ? -b : b) * dt_tau + std::sqrt(var) * rng.normal();
    const double bridge_min = 0.5 * (z - std::sqrt(z * z - 2.0 * var * std::log(rng.uniform_open())));
    const double y = std::abs(delta_mu);
    if (y + bridge_min > 0.0) return delta_mu > 0.0 ? y + z : -(y + z);
    const double r = z - bridge_min;
    return rng.uniform() < 0.5 ? -r : r;
  }
  const double half_sd = D > 0.0 ? std::sqrt(0.5 * D * dt_tau) : 0.0;
  double x = delta_mu;
  if (half_sd > 0.0) x += half_sd * rng.normal();
  x = regime == Regime::Stable ? restoring_flow(x, b, dt_tau) : x + b * dt_tau * sign(x);
  if (half_sd > 0.0) x += half_sd * rng.normal();
  return x;
}

double reflect_price_floor(double delta_mu, double mean_price) {
  const double floor = kPriceFloor * mean_price;
  const double price = mean_price + delta_mu;
  if (price >= floor) return delta_mu;
  const double reflected = std::max(floor, 2.0 * floor - price);
  return reflected - mean_price;
}

double stationary_price_density(double delta_mu, const NoiseModel& noise) {
  validate(noise);
  require(noise.amplitude_D > 0.0, ErrorKind::DegenerateDistribution,
          "D = 0: stationary price law is a point mass at zero deviation");
  const double ratio = noise.response_b / noise.amplitude_D;
  return ratio * std::exp(-2.0 * ratio * std::abs(delta_mu));
}

double stationary_price_variance(const NoiseModel& noise) {
  validate(noise);
  return noise.amplitude_D * noise.amplitude_D / (2.0 * noise.response_b * noise.response_b);
}

double stationary_price_scale(const NoiseModel& noise) {
  validate(noise);
  return noise.amplitude_D / (2.0 * noise.response_b);
}

double weighted_price_variance(std::span<const BrandState> brands, std::span<const double> deviations) {
  require(brands.size() == deviations.size(), ErrorKind::PreconditionViolated,
          "weighted_price_variance: size mismatch");
  const double mean = weighted_mean(brands, deviations);
  double total = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < brands.size(); ++i) {
    const double d = deviations[i] - mean;
    total += brands[i].sales_y;
    sum += brands[i].sales_y * d * d;
  }
  return sum / total;
}

double ensemble_price_variance(std::span<const BrandState> brands, std::span<const double> deviations) {
  require(brands.size() == deviations.size(), ErrorKind::PreconditionViolated,
          "ensemble_price_variance: size mismatch");
  double n = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < brands.size(); ++i) {
    if (brands[i].extinct) continue;
    n += 1.0;
    sum += deviations[i];
  }
  if (n < 2.0) return 0.0;
  const double mean = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < brands.size(); ++i) {
    if (!brands[i].extinct) ss += (deviations[i] - mean) * (deviations[i] - mean);
  }
  return ss / n;
}

double decline_rate(const MarketMeans& m, const MarketParams& p, double factor) {
  return factor * p.epsilon * m.eta * m.gamma * m.psi0 * p.alpha * m.price_variance;
}

double mean_price_ode_step(double mean_price, const MarketParams& params, const MarketMeans& means,
                           double dt_long) {
  require(std::isfinite(means.eta) && std::isfinite(means.gamma) && std::isfinite(means.psi0) &&
              std::isfinite(means.price_variance),
          ErrorKind::InvalidParameter, "market means must be finite");
  require(means.price_variance >= 0.0, ErrorKind::InvalidParameter,
          "price variance must be non-negative");
  const double a = decline_rate(means, params);
  return mean_price - a * (mean_price - params.mu_nat) * dt_long;
}

double mean_price_closed_form(double t, double mu0, double decline_rate_a, double mu_nat) {
  require(t >= 0.0, ErrorKind::InvalidParameter, "closed form requires t >= 0");
  return mu0 * std::exp(-decline_rate_a * t) + mu_nat;
}

RegimeReport detect_regime(double total_supply, double demand) {
  RegimeReport r;
  r.mean_gamma = mean_reproduction(total_supply, demand);
  r.regime = regime_of(r.mean_gamma);
  return r;
}

RegimeReport detect_regime(const MarketState& state, const DemandParams& demand, double psi0) {
  const Aggregates agg = aggregate(state);
  const double n = state.adopter_fraction_n;
  RegimeReport r =
      detect_regime(agg.total_supply, demand_rate(state.mean_price, state.time_t, demand, n));
  if (state.mean_price > demand.mu_nat && in_quadratic_region(state.mean_price, state.time_t, demand)) {
    double eta = 0.0;
    for (const auto& b : state.brands) eta += b.sales_y * b.preference_eta;
    eta /= agg.total_sales;
    const double slope =
        eta * r.mean_gamma * psi0 * demand_slope(state.mean_price, state.time_t, demand, n);
    r.fitness_slope = slope;
    r.slope_consistent = r.regime == Regime::Stable ? slope < 0.0 : slope >= 0.0;
  }
  return r;
}

std::optional<double> clearing_price(double total_supply, double t, const DemandParams& demand,
                                     double n) {
  if (!(n > 0.0) || !(demand.alpha > 0.0)) return std::nullopt;
  const double gap = demand.d_max * seasonal_factor(t, demand) - total_supply / n;
  if (gap < 0.0) return std::nullopt;
  return demand.mu_nat + std::sqrt(gap / demand.alpha);
}

std::optional<double> minimal_restoring_jump(double mean_price, double total_supply, double t,
                                             const DemandParams& demand, double n) {
  if (demand_rate(mean_price, t, demand, n) < total_supply) return 0.0;
  if (!(total_supply > 0.0) || !(demand.alpha > 0.0) || !(n > 0.0)) return std::nullopt;
  const auto clearing = clearing_price(total_supply, t, demand, n);
  if (!clearing) return 0.0;
  const double edge = demand.mu_nat + std::sqrt(demand.d_max * seasonal_factor(t, demand) / demand.alpha);
  const double j_min = std::max(0.0, *clearing - mean_price);
  if (mean_price + j_min >= edge) return std::nullopt;
  return j_min;
}

JumpOutcome unstable_jump(double mean_price, const MarketState& state, const DemandParams& demand,
                          const JumpConfig& config, Rng& rng) {
  require(config.mean_size >= 0.0 && std::isfinite(config.mean_size), ErrorKind::InvalidParameter,
          "jump mean size must be finite and >= 0");
  const Aggregates agg = aggregate(state);
  const double n = state.adopter_fraction_n;
  const double t = state.time_t;
  const double d = demand_rate(mean_price, t, demand, n);
  require(d > 0.0, ErrorKind::DegenerateMarket, "demand is zero at the current mean price");
  require(regime_of(mean_reproduction(agg.total_supply, d)) == Regime::Unstable,
          ErrorKind::PreconditionViolated, "unstable_jump called in the stable regime");

  JumpOutcome out;
  out.mean_price = mean_price;
  const auto j_min = minimal_restoring_jump(mean_price, agg.total_supply, t, demand, n);
  if (!j_min) return out;

  const double edge = demand.mu_nat + std::sqrt(demand.d_max * seasonal_factor(t, demand) / demand.alpha);
  const double room = edge - (mean_price + *j_min);
  double overshoot = config.mean_size > 0.0 ? rng.exponential(config.mean_size) : 0.0;
  // A jump landing exactly on the clearing price leaves <gamma> = 0, still
  // unstable; past the edge demand vanishes altogether.
  if (overshoot <= 0.0) overshoot = 1e-9 * room;
  if (overshoot >= room) overshoot = 0.5 * room;

  out.minimal_jump = *j_min;
  out.jump = *j_min + overshoot;
  out.mean_price = mean_price + out.jump;
  out.resolved = demand_rate(out.mean_price, t, demand, n) < agg.total_supply;
  return out;
}

}  // namespace evomarket
