#pragma once

// Short-scale price deviations (Langevin dynamics with a sign restoring
// force), the long-scale mean-price law, and the regime logic around market
// clearing.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evomarket/demand.hpp"
#include "evomarket/market_core.hpp"
#include "evomarket/rng.hpp"

namespace evomarket {

struct NoiseModel {
  double amplitude_D = 0.02;
  double response_b = 0.1;

  static NoiseModel from(const MarketParams& params) {
    return {params.noise_D, params.response_b};
  }
};

void validate(const NoiseModel& noise);

/// Per-brand decomposition mu_i = mean_price + deviations[i].
struct PriceField {
  std::vector<double> deviations;
  double mean_price = 0.0;
  double price_variance = 0.0;
  double decline_rate_a = 0.0;
  std::optional<double> mu_clearing;
  // Preference and reproduction deviations are recorded but do not feed the
  // price dynamics.
  std::vector<double> preference_deviations;
  std::vector<double> gamma_deviations;

  double price(std::size_t i) const { return mean_price + deviations[i]; }
};

/// Stable: -b sign(dmu); Unstable: +b sign(dmu). sign(0) = 0.
double restoring_force(double delta_mu, Regime regime, double response_b);

enum class LangevinScheme {
  // Exact in law for any dt: |dmu| is a reflected Brownian motion with drift
  // -b (Stable) or +b (Unstable), sampled from its endpoint and the minimum
  // of the Brownian bridge; once the path touches zero the sign is a fair coin.
  Exact,
  // Half the noise, the exact flow of the sign drift (which stops at the
  // origin), then the other half of the noise. Small O(dt) bias at the origin.
  Splitting,
  EulerMaruyama,
};

/// One step of d(dmu)/dtau = F(dmu) + white noise of strength D.
double langevin_step(double delta_mu, const NoiseModel& noise, Regime regime, double dt_tau,
                     Rng& rng, LangevinScheme scheme = LangevinScheme::Exact);

/// Relative price floor: brand prices stay above kPriceFloor * mean price.
inline constexpr double kPriceFloor = 1e-9;

/// Reflects a deviation so that mean_price + deviation stays above the floor.
double reflect_price_floor(double delta_mu, double mean_price);

/// Laplace density (b/D) exp(-2b|dmu|/D). Throws Error(DegenerateDistribution)
/// for D = 0, where the law collapses onto a point mass at zero.
double stationary_price_density(double delta_mu, const NoiseModel& noise);

/// D^2 / (2 b^2).
double stationary_price_variance(const NoiseModel& noise);

/// D / (2 b), the mean absolute deviation and Laplace scale.
double stationary_price_scale(const NoiseModel& noise);

/// Sales-weighted variance of the deviations about their weighted mean.
double weighted_price_variance(std::span<const BrandState> brands, std::span<const double> deviations);

/// Empirical (1/n) variance of the deviations of brands still in the market;
/// this is Var(P_mu) for the mean-price law. Zero with fewer than two
/// surviving brands.
double ensemble_price_variance(std::span<const BrandState> brands, std::span<const double> deviations);

struct MarketMeans {
  double eta = 1.0;
  double gamma = 0.0;
  double psi0 = 1.0;
  double price_variance = 0.0;
};

/// Factor multiplying epsilon <eta><gamma> psi0 alpha Var in the decline
/// rate. The linearized mean-price ODE carries a 2 from differentiating the
/// quadratic demand; the closed-form rate is usually quoted without it.
inline constexpr double kDeclineRateFactor = 2.0;

double decline_rate(const MarketMeans& means, const MarketParams& params,
                    double factor = kDeclineRateFactor);

/// Euler step of d<mu>/dt = -a (<mu> - mu_nat).
double mean_price_ode_step(double mean_price, const MarketParams& params, const MarketMeans& means,
                           double dt_long);

/// mu0 e^{-a t} + mu_nat. Requires t >= 0.
double mean_price_closed_form(double t, double mu0, double decline_rate_a, double mu_nat);

struct RegimeReport {
  Regime regime = Regime::Stable;
  double mean_gamma = 0.0;
  std::optional<double> fitness_slope;  // df(<mu>)/dmu when <mu> > mu_nat
  bool slope_consistent = true;
};

/// Stable iff s_t / d - 1 > 0.
RegimeReport detect_regime(double total_supply, double demand);

/// Evaluates the demand at the state's mean price and reports the fitness
/// slope sign check when the mean price lies above the natural price.
RegimeReport detect_regime(const MarketState& state, const DemandParams& demand, double psi0);

/// Upper-branch price at which demand equals the given supply level.
std::optional<double> clearing_price(double total_supply, double t, const DemandParams& demand,
                                     double adopter_fraction);

/// Smallest upward jump J with d(mean_price + J) = total_supply. Returns 0
/// when demand is already below supply and nothing when no jump inside the
/// quadratic demand region restores excess supply.
std::optional<double> minimal_restoring_jump(double mean_price, double total_supply, double t,
                                             const DemandParams& demand, double adopter_fraction);

struct JumpConfig {
  double mean_size = 0.05;  // mean exponential overshoot above the minimal jump
};

struct JumpOutcome {
  bool resolved = false;
  double jump = 0.0;
  double minimal_jump = 0.0;
  double mean_price = 0.0;
};

/// Upward price jump out of the unstable regime. The jump is the minimal
/// restoring jump plus an exponential overshoot, kept inside the quadratic
/// demand region. Throws Error(PreconditionViolated) when the market is
/// stable at `mean_price`; returns resolved = false when no restoring jump
/// exists.
JumpOutcome unstable_jump(double mean_price, const MarketState& state, const DemandParams& demand,
                          const JumpConfig& config, Rng& rng);

}  // namespace evomarket
