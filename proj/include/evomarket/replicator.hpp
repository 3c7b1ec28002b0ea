#pragma once

// Product fitness, the sales-conserving replicator step, multiplicative
// fitness shocks and the two-brand substitution analysis.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "evomarket/demand.hpp"
#include "evomarket/estimators.hpp"
#include "evomarket/market_core.hpp"
#include "evomarket/rng.hpp"

namespace evomarket {

struct FitnessVector {
  std::vector<double> values;
  double mean = 0.0;
  double variance = 0.0;
};

struct GrowthRecord {
  std::vector<double> rates;      // r_i = f_i - <f>
  std::vector<double> log_sizes;  // ln(y_i / y_i(0))
};

/// Brands below this fraction of total sales are frozen and flagged extinct.
inline constexpr double kExtinctionFraction = 1e-12;

/// f = eta * gamma * psi_s(mu).
double fitness(const BrandState& brand, double psi_s_at_price);

/// psi0 * d(price): the stationary consumer density seen at one brand price.
double stationary_density_at_price(double price, double t, const DemandParams& demand,
                                   double adopter_fraction, double psi0);

/// Recomputes every brand's fitness from its own price.
void update_fitness(MarketState& state, const DemandParams& demand, double psi0);

FitnessVector summarize_fitness(const MarketState& state);

/// Sales-weighted fitness variance sum_i (y_i/y_t)(f_i - <f>)^2.
double fitness_variance(const MarketState& state);

GrowthRecord growth_record(const MarketState& state, const std::vector<double>& initial_sales);

/// Explicit Euler step of dy_i/dtau = (f_i - <f>) y_i followed by an exact
/// rescale restoring the pre-step total. Throws Error(StepSize) when
/// dt * max|r_i| >= 1.
void apply_replicator_step(MarketState& state, double dt_tau);
MarketState replicator_step(MarketState state, double dt_tau);

enum class ShockDistribution { Normal, Uniform };

struct FitnessShock {
  ShockDistribution distribution = ShockDistribution::Normal;
  double sd = 0.0;

  bool operator==(const FitnessShock&) const = default;
};

double draw_shock(const FitnessShock& shock, Rng& rng);

/// Adds i.i.d. zero-mean shocks to every f_i, then takes a replicator step.
void apply_fitness_perturbation_step(MarketState& state, double dt_tau, const FitnessShock& shock,
                                     Rng& rng);
MarketState fitness_perturbation_step(MarketState state, double dt_tau, const FitnessShock& shock,
                                      Rng& rng);

struct LogisticFit {
  double slope = 0.0;        // long-scale rate theta * epsilon
  double short_slope = 0.0;  // theta, per unit short-scale time
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t count = 0;
};

/// Least-squares fit of ln(y_a / y_b) over the trajectory. The regression
/// runs on the short-scale clock, where the replicator acts; the long-scale
/// rate is the short-scale rate times epsilon. Throws Error(DegenerateMarket)
/// on any non-positive sales sample.
LogisticFit substitution_analysis(const Trajectory& trajectory, std::size_t brand_a,
                                  std::size_t brand_b, double epsilon);

struct SizeEnsembleConfig {
  std::size_t replicates = 1000;
  std::size_t brands = 20;
  std::size_t steps = 1000;
  std::size_t checkpoint_every = 100;
  double dt_tau = 1.0;
  std::vector<double> base_fitness;  // empty: all zero
  FitnessShock shock{ShockDistribution::Normal, 0.01};
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct SizeEnsembleResult {
  std::vector<double> checkpoint_tau;
  std::vector<std::vector<double>> log_sizes;  // [checkpoint][replicate], focal brand 0
};

/// Independent multi-brand markets under fitness shocks; records the log size
/// ln(y_0 / y_0(0)) of brand 0 at each checkpoint. Replicate r uses
/// Rng::derive_seed(seed, r), so results do not depend on the thread count.
SizeEnsembleResult run_size_ensemble(const SizeEnsembleConfig& config);

}  // namespace evomarket
