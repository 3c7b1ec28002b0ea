#pragma once

// Domain types shared by every engine: model constants, per-brand state,
// market aggregates and the recorded trajectory.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace evomarket {

/// Scalar model constants. Densities elsewhere are already scaled by the
/// market potential; it is kept only for reporting absolute figures.
struct MarketParams {
  double market_potential = 1.0e6;
  double mean_amount = 1.0;   // units per purchase
  double alpha = 2.0;         // demand curvature around the natural price
  double d_max = 1.0;         // maximum demand rate
  double mu_nat = 1.0;        // natural price
  double epsilon = 0.02;      // short/long time-scale ratio
  double psi0 = 1.0;          // inverse preference-inventory normalizer
  double noise_D = 0.02;      // price white-noise amplitude
  double response_b = 0.1;    // mean price response per unit time
  std::uint64_t rng_seed = 1;

  bool operator==(const MarketParams&) const = default;
};

void validate(const MarketParams& params);

enum class Regime { Stable, Unstable };

std::string_view to_string(Regime regime);

/// Stable iff the mean reproduction coefficient is strictly positive.
constexpr Regime regime_of(double mean_gamma) {
  return mean_gamma > 0.0 ? Regime::Stable : Regime::Unstable;
}

struct BrandState {
  double sales_y = 0.0;
  double supply_s = 0.0;
  double inventory_x = 0.0;
  double price_mu = 1.0;
  double preference_eta = 1.0;
  double reproduction_gamma = 0.0;
  double fitness_f = 0.0;
  bool extinct = false;

  bool operator==(const BrandState&) const = default;
};

void validate(const BrandState& brand, std::size_t index);

struct Aggregates {
  double total_sales = 0.0;
  double total_supply = 0.0;
  double mean_price = 0.0;
  double mean_fitness = 0.0;
  double mean_gamma = 0.0;
};

struct MarketState {
  std::vector<BrandState> brands;
  double consumer_density_psi = 0.0;
  double adopter_fraction_n = 1.0;
  double mean_price = 0.0;
  double mean_fitness = 0.0;
  double mean_gamma = 0.0;
  Regime regime = Regime::Stable;
  double time_t = 0.0;
  double time_tau = 0.0;
};

/// Builds a validated market with aggregates computed from the brands.
/// Throws Error(Monopoly) for fewer than two brands and
/// Error(InvalidParameter) for any non-finite or out-of-range field.
MarketState new_scenario(const MarketParams& params, std::vector<BrandState> brands,
                         double adopter_fraction);

/// Sales-weighted aggregates; mean_gamma solves s_t = (1 + <gamma>) y_t.
/// Throws Error(DegenerateMarket) when total sales are zero.
Aggregates aggregate(std::span<const BrandState> brands);
Aggregates aggregate(const MarketState& state);

/// Recomputes the stored aggregates and regime flag from the brand vector.
void refresh_aggregates(MarketState& state);

/// Short-scale time corresponding to a long-scale time (t = epsilon * tau).
double scale_time(double t_long, const MarketParams& params);

/// Sales-weighted mean of an arbitrary per-brand quantity.
double weighted_mean(std::span<const BrandState> brands, std::span<const double> values);

struct BrandSample {
  double sales_y = 0.0;
  double price_mu = 0.0;
  double fitness_f = 0.0;
  double price_deviation = 0.0;
  double growth_r = 0.0;
};

struct Snapshot {
  double t = 0.0;
  double tau = 0.0;
  double mean_price = 0.0;
  double mean_fitness = 0.0;
  double mean_gamma = 0.0;
  Regime regime = Regime::Stable;
  double total_sales = 0.0;
  double total_supply = 0.0;
  double reference_price = 0.0;  // slow mean-price variable driven by the long-scale ODE
  double price_variance = 0.0;   // measured sales-weighted variance of the deviations
  std::vector<BrandSample> brands;
};

/// Builds a snapshot from a market state; growth rates are f_i - <f>.
Snapshot make_snapshot(const MarketState& state, std::span<const double> price_deviations,
                       double reference_price, double price_variance);

struct JumpEvent {
  double t = 0.0;
  double size = 0.0;
  double price_before = 0.0;
  double price_after = 0.0;
};

class Trajectory {
 public:
  /// Appends a snapshot. Sample times must be strictly increasing and the
  /// brand count constant, otherwise Error(PreconditionViolated).
  void append(Snapshot snapshot);

  void record_jump(const JumpEvent& jump) { jumps_.push_back(jump); }

  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  const std::vector<JumpEvent>& jumps() const { return jumps_; }
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  std::size_t brand_count() const {
    return snapshots_.empty() ? 0 : snapshots_.front().brands.size();
  }

 private:
  std::vector<Snapshot> snapshots_;
  std::vector<JumpEvent> jumps_;
};

}  // namespace evomarket
