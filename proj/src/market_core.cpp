#include "evomarket/market_core.hpp"

#include <cmath>
#include <string>

#include "evomarket/error.hpp"

namespace evomarket {

namespace {

void require_finite(double value, const std::string& name) {
  require(std::isfinite(value), ErrorKind::InvalidParameter, name + " must be finite");
}

}  // namespace

void validate(const MarketParams& p) {
  require_finite(p.market_potential, "market_potential_M");
  require_finite(p.mean_amount, "mean_amount_m");
  require_finite(p.alpha, "alpha");
  require_finite(p.d_max, "d_max");
  require_finite(p.mu_nat, "mu_nat");
  require_finite(p.epsilon, "epsilon");
  require_finite(p.psi0, "psi0");
  require_finite(p.noise_D, "noise_D");
  require_finite(p.response_b, "response_b");
  require(p.market_potential > 0.0, ErrorKind::InvalidParameter,
          "market_potential_M must be positive");
  require(p.mean_amount >= 1.0, ErrorKind::InvalidParameter,
          "mean_amount_m must be at least one unit");
  require(p.alpha >= 0.0, ErrorKind::InvalidParameter, "alpha must be >= 0");
  require(p.d_max > 0.0, ErrorKind::InvalidParameter, "d_max must be > 0");
  require(p.mu_nat > 0.0, ErrorKind::InvalidParameter, "mu_nat must be > 0");
  require(p.epsilon > 0.0 && p.epsilon < 1.0, ErrorKind::InvalidParameter,
          "epsilon must lie in (0, 1)");
  require(p.psi0 > 0.0, ErrorKind::InvalidParameter, "psi0 must be > 0");
  require(p.noise_D >= 0.0, ErrorKind::InvalidParameter, "noise_D must be >= 0");
  require(p.response_b > 0.0, ErrorKind::InvalidParameter, "response_b must be > 0");
}

std::string_view to_string(Regime regime) {
  return regime == Regime::Stable ? "Stable" : "Unstable";
}

void validate(const BrandState& b, std::size_t index) {
  const std::string prefix = "brands[" + std::to_string(index) + "].";
  require_finite(b.sales_y, prefix + "sales_y");
  require_finite(b.supply_s, prefix + "supply_s");
  require_finite(b.inventory_x, prefix + "inventory_x");
  require_finite(b.price_mu, prefix + "price_mu");
  require_finite(b.preference_eta, prefix + "preference_eta");
  require_finite(b.reproduction_gamma, prefix + "reproduction_gamma");
  require_finite(b.fitness_f, prefix + "fitness_f");
  require(b.sales_y >= 0.0, ErrorKind::InvalidParameter, prefix + "sales_y must be >= 0");
  require(b.supply_s >= 0.0, ErrorKind::InvalidParameter, prefix + "supply_s must be >= 0");
  require(b.inventory_x >= 0.0, ErrorKind::InvalidParameter,
          prefix + "inventory_x must be >= 0");
  require(b.price_mu > 0.0, ErrorKind::InvalidParameter, prefix + "price_mu must be > 0");
  require(b.preference_eta > 0.0, ErrorKind::InvalidParameter,
          prefix + "preference_eta must be > 0");
}

MarketState new_scenario(const MarketParams& params, std::vector<BrandState> brands,
                         double adopter_fraction) {
  validate(params);
  require(brands.size() >= 2, ErrorKind::Monopoly,
          "at least two brands are required (monopoly markets are excluded)");
  for (std::size_t i = 0; i < brands.size(); ++i) validate(brands[i], i);
  require(std::isfinite(adopter_fraction) && adopter_fraction >= 0.0 && adopter_fraction <= 1.0,
          ErrorKind::InvalidParameter, "adopter_fraction must lie in [0, 1]");

  MarketState state;
  state.brands = std::move(brands);
  state.adopter_fraction_n = adopter_fraction;
  refresh_aggregates(state);
  return state;
}

Aggregates aggregate(std::span<const BrandState> brands) {
  Aggregates agg;
  double price_sum = 0.0;
  double fitness_sum = 0.0;
  for (const auto& b : brands) {
    agg.total_sales += b.sales_y;
    agg.total_supply += b.supply_s;
    price_sum += b.sales_y * b.price_mu;
    fitness_sum += b.sales_y * b.fitness_f;
  }
  require(agg.total_sales > 0.0, ErrorKind::DegenerateMarket,
          "total sales are zero; weighted means are undefined");
  agg.mean_price = price_sum / agg.total_sales;
  agg.mean_fitness = fitness_sum / agg.total_sales;
  agg.mean_gamma = agg.total_supply / agg.total_sales - 1.0;
  return agg;
}

Aggregates aggregate(const MarketState& state) { return aggregate(state.brands); }

void refresh_aggregates(MarketState& state) {
  const Aggregates agg = aggregate(state.brands);
  state.mean_price = agg.mean_price;
  state.mean_fitness = agg.mean_fitness;
  state.mean_gamma = agg.mean_gamma;
  state.regime = regime_of(agg.mean_gamma);
}

double scale_time(double t_long, const MarketParams& params) {
  require(params.epsilon > 0.0 && params.epsilon < 1.0, ErrorKind::InvalidParameter,
          "epsilon must lie in (0, 1)");
  return t_long / params.epsilon;
}

double weighted_mean(std::span<const BrandState> brands, std::span<const double> values) {
  require(brands.size() == values.size(), ErrorKind::PreconditionViolated,
          "weighted_mean: size mismatch");
  double total = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < brands.size(); ++i) {
    total += brands[i].sales_y;
    sum += brands[i].sales_y * values[i];
  }
  require(total > 0.0, ErrorKind::DegenerateMarket, "total sales are zero");
  return sum / total;
}

Snapshot make_snapshot(const MarketState& state, std::span<const double> price_deviations,
                       double reference_price, double price_variance) {
  require(price_deviations.empty() || price_deviations.size() == state.brands.size(),
          ErrorKind::PreconditionViolated, "make_snapshot: deviation count mismatch");
  const Aggregates agg = aggregate(state);
  Snapshot snap;
  snap.t = state.time_t;
  snap.tau = state.time_tau;
  snap.mean_price = agg.mean_price;
  snap.mean_fitness = agg.mean_fitness;
  snap.mean_gamma = agg.mean_gamma;
  snap.regime = regime_of(agg.mean_gamma);
  snap.total_sales = agg.total_sales;
  snap.total_supply = agg.total_supply;
  snap.reference_price = reference_price;
  snap.price_variance = price_variance;
  snap.brands.reserve(state.brands.size());
  for (std::size_t i = 0; i < state.brands.size(); ++i) {
    const auto& b = state.brands[i];
    BrandSample s;
    s.sales_y = b.sales_y;
    s.price_mu = b.price_mu;
    s.fitness_f = b.fitness_f;
    s.price_deviation =
        price_deviations.empty() ? b.price_mu - agg.mean_price : price_deviations[i];
    s.growth_r = b.fitness_f - agg.mean_fitness;
    snap.brands.push_back(s);
  }
  return snap;
}

void Trajectory::append(Snapshot snapshot) {
  if (!snapshots_.empty()) {
    require(snapshot.t > snapshots_.back().t, ErrorKind::PreconditionViolated,
            "trajectory sample times must be strictly increasing");
    require(snapshot.brands.size() == snapshots_.front().brands.size(),
            ErrorKind::PreconditionViolated, "trajectory brand count changed");
  }
  snapshots_.push_back(std::move(snapshot));
}

}  // namespace evomarket
