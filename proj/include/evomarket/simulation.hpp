#pragma once

// The two-time-scale loop: fast price relaxation and replicator selection on
// the short clock, mean-price motion, supply, demand and regime updates on
// the long clock.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evomarket/demand.hpp"
#include "evomarket/market_core.hpp"
#include "evomarket/price.hpp"
#include "evomarket/replicator.hpp"
#include "evomarket/rng.hpp"
#include "evomarket/supply.hpp"

namespace evomarket {

struct BrandInit {
  double sales_y = 0.5;
  double price_mu = 1.0;
  double preference_eta = 1.0;
  double reproduction_gamma = 0.1;
  double inventory_x = 1.0;

  bool operator==(const BrandInit&) const = default;
};

/// Multiplies d_max by `d_max_factor` from `time` onwards (factors compound).
struct DemandShock {
  double time = 0.0;
  double d_max_factor = 1.0;

  bool operator==(const DemandShock&) const = default;
};

enum class VarianceMode { Live, Frozen };

struct RunConfig {
  double dt_tau = 1.0;
  double dt_long = 1.0;
  std::size_t long_steps = 100;
  std::size_t snapshot_stride = 1;
  // 0: dt_long / (epsilon dt_tau), i.e. the short steps spanning one long step.
  std::size_t short_steps_per_long = 0;
  FitnessShock fitness_shock;
  VarianceMode variance_mode = VarianceMode::Live;
  double frozen_variance = 0.0;
  double jump_mean = 0.05;
  LangevinScheme langevin_scheme = LangevinScheme::Exact;
  bool evolve_adopters = false;
  std::size_t ensemble_size = 1;

  bool operator==(const RunConfig&) const = default;
};

struct OutputConfig {
  std::string timeseries = "timeseries.csv";
  std::string report = "report.json";

  bool operator==(const OutputConfig&) const = default;
};

/// Everything a run needs. The random seed is params.rng_seed.
struct Scenario {
  MarketParams params;
  DemandParams demand;
  std::vector<BrandInit> brands;
  double adopter_fraction = 1.0;
  std::vector<SupplyShock> supply_shocks;
  std::vector<DemandShock> demand_shocks;
  RunConfig run;
  OutputConfig outputs;

  bool operator==(const Scenario&) const = default;
};

/// Two symmetric brands around the natural price.
Scenario default_scenario();

/// Checks everything new_scenario does plus the run and shock settings.
void validate(const Scenario& scenario);

enum class RunStatus { Completed, ShortageUnresolved };

std::string_view to_string(RunStatus status);

/// What happened during the most recent long step.
struct StepInfo {
  std::size_t step = 0;
  double t = 0.0;
  double demand = 0.0;        // at the reference price, after the demand update
  double total_supply = 0.0;
  double mean_gamma = 0.0;    // s_t / d - 1 before any jump
  Regime regime = Regime::Stable;
  std::optional<JumpOutcome> jump;
  double price_variance = 0.0;
  std::size_t stock_outs = 0;
};

struct SimulationResult {
  Trajectory trajectory;
  RunStatus status = RunStatus::Completed;
  std::size_t long_steps_done = 0;
  std::size_t stock_outs = 0;
  std::string halt_reason;
};

/// Stateful driver. Per long step:
///   1. short_steps_per_long short steps: Langevin step of each deviation in
///      the current regime, fitness at the brand prices (plus shocks),
///      replicator, inventory and consumer-density updates;
///   2. sales-weighted variance of the deviations (live or frozen);
///   3. one Euler step of the mean-price law for the reference price;
///   4. t += dt_long, scheduled supply and demand changes, adoption;
///   5. supply s_i = (1 + gamma_i(t)) y_i from the sales of the step just
///      finished, then sales rescaled to the demand at the reference price;
///      the regime follows from <gamma> = s_t / d - 1;
///   6. in the unstable regime an upward jump of the reference price, or a
///      halt when no jump restores excess supply.
class Simulator {
 public:
  explicit Simulator(const Scenario& scenario);

  /// Advances one long step. Returns false once the run has halted.
  bool step();

  /// Runs the configured number of long steps, snapshotting every stride.
  SimulationResult run();

  const MarketState& state() const { return state_; }
  const std::vector<double>& deviations() const { return deviations_; }
  double reference_price() const { return reference_price_; }
  double price_variance() const { return price_variance_; }
  const DemandParams& current_demand() const { return demand_now_; }
  const StepInfo& last_step() const { return last_; }
  std::size_t short_steps_per_long() const { return short_steps_; }
  bool halted() const { return status_ != RunStatus::Completed; }
  Snapshot snapshot() const;

 private:
  void short_step();
  void long_step();
  void rescale_sales(double demand);

  Scenario scenario_;
  MarketState state_;
  SupplyPolicy policy_;
  NoiseModel noise_;
  Rng rng_;
  std::vector<double> deviations_;
  DemandParams demand_now_;
  double reference_price_ = 0.0;
  double price_variance_ = 0.0;
  std::size_t short_steps_ = 0;
  std::size_t steps_done_ = 0;
  std::size_t stock_outs_ = 0;
  RunStatus status_ = RunStatus::Completed;
  std::string halt_reason_;
  StepInfo last_;
};

/// Convenience wrapper around Simulator::run. Engine errors are rethrown with
/// the long-step index prepended.
SimulationResult run_simulation(const Scenario& scenario);

}  // namespace evomarket
