#include "evomarket/simulation.hpp"

#include <cmath>
#include <string>

#include "evomarket/error.hpp"

namespace evomarket {

namespace {

// alpha, d_max and mu_nat live in MarketParams; the demand section only adds
// adoption and seasonality.
DemandParams base_demand(const Scenario& sc) {
  DemandParams d = sc.demand;
  d.alpha = sc.params.alpha;
  d.d_max = sc.params.d_max;
  d.mu_nat = sc.params.mu_nat;
  return d;
}

std::vector<BrandState> initial_brands(const Scenario& sc) {
  std::vector<BrandState> brands;
  brands.reserve(sc.brands.size());
  for (const auto& init : sc.brands) {
    BrandState b;
    b.sales_y = init.sales_y;
    b.price_mu = init.price_mu;
    b.preference_eta = init.preference_eta;
    b.reproduction_gamma = init.reproduction_gamma;
    b.inventory_x = init.inventory_x;
    b.supply_s = init.sales_y * std::max(0.0, 1.0 + init.reproduction_gamma);
    brands.push_back(b);
  }
  return brands;
}

std::size_t auto_short_steps(const Scenario& sc) {
  if (sc.run.short_steps_per_long > 0) return sc.run.short_steps_per_long;
  const double n = sc.run.dt_long / (sc.params.epsilon * sc.run.dt_tau);
  return static_cast<std::size_t>(std::max(1.0, std::round(n)));
}

}  // namespace

Scenario default_scenario() {
  Scenario sc;
  sc.brands = {
      BrandInit{0.5, 1.10, 1.0, 0.10, 1.0},
      BrandInit{0.5, 1.20, 1.0, 0.15, 1.0},
  };
  sc.demand = base_demand(sc);
  return sc;
}

void validate(const Scenario& sc) {
  validate(sc.params);
  validate(base_demand(sc));
  require(sc.brands.size() >= 2, ErrorKind::Monopoly,
          "brands: at least two brands are required (monopoly markets are excluded)");
  for (std::size_t i = 0; i < sc.brands.size(); ++i) {
    const auto& b = sc.brands[i];
    const std::string at = "brands[" + std::to_string(i) + "].";
    require(std::isfinite(b.reproduction_gamma) && b.reproduction_gamma >= -1.0,
            ErrorKind::InvalidParameter, at + "reproduction_gamma must be >= -1");
  }
  (void)new_scenario(sc.params, initial_brands(sc), sc.adopter_fraction);

  const auto& r = sc.run;
  require(std::isfinite(r.dt_tau) && r.dt_tau > 0.0, ErrorKind::InvalidParameter,
          "run.dt_tau must be > 0");
  require(std::isfinite(r.dt_long) && r.dt_long > 0.0, ErrorKind::InvalidParameter,
          "run.dt_long must be > 0");
  require(r.snapshot_stride >= 1, ErrorKind::InvalidParameter, "run.snapshot_stride must be >= 1");
  require(std::isfinite(r.fitness_shock.sd) && r.fitness_shock.sd >= 0.0,
          ErrorKind::InvalidParameter, "run.fitness_shock.sd must be >= 0");
  require(std::isfinite(r.frozen_variance) && r.frozen_variance >= 0.0,
          ErrorKind::InvalidParameter, "run.frozen_variance must be >= 0");
  require(std::isfinite(r.jump_mean) && r.jump_mean >= 0.0, ErrorKind::InvalidParameter,
          "run.jump_mean must be >= 0");
  require(r.ensemble_size >= 1, ErrorKind::InvalidParameter, "run.ensemble_size must be >= 1");

  for (std::size_t i = 0; i < sc.supply_shocks.size(); ++i) {
    const auto& s = sc.supply_shocks[i];
    const std::string at = "shocks.supply[" + std::to_string(i) + "].";
    require(std::isfinite(s.time) && std::isfinite(s.gamma_delta), ErrorKind::InvalidParameter,
            at + "time and gamma_delta must be finite");
    require(!s.brand || *s.brand < sc.brands.size(), ErrorKind::InvalidParameter,
            at + "brand index out of range");
  }
  for (std::size_t i = 0; i < sc.demand_shocks.size(); ++i) {
    const auto& s = sc.demand_shocks[i];
    const std::string at = "shocks.demand[" + std::to_string(i) + "].";
    require(std::isfinite(s.time), ErrorKind::InvalidParameter, at + "time must be finite");
    require(std::isfinite(s.d_max_factor) && s.d_max_factor > 0.0, ErrorKind::InvalidParameter,
            at + "d_max_factor must be > 0");
  }
}

std::string_view to_string(RunStatus status) {
  return status == RunStatus::Completed ? "completed" : "shortage_unresolved";
}

Simulator::Simulator(const Scenario& scenario)
    : scenario_(scenario),
      noise_(NoiseModel::from(scenario.params)),
      rng_(scenario.params.rng_seed) {
  validate(scenario_);
  state_ = new_scenario(scenario_.params, initial_brands(scenario_), scenario_.adopter_fraction);
  std::vector<double> gammas;
  for (const auto& b : scenario_.brands) gammas.push_back(b.reproduction_gamma);
  policy_ = SupplyPolicy(std::move(gammas), scenario_.supply_shocks);
  demand_now_ = base_demand(scenario_);
  short_steps_ = auto_short_steps(scenario_);

  reference_price_ = state_.mean_price;
  for (const auto& b : state_.brands) deviations_.push_back(b.price_mu - reference_price_);

  // Sales start equal to the demand at the initial mean price.
  const double d = demand_rate(reference_price_, 0.0, demand_now_, state_.adopter_fraction_n);
  require(d > 0.0, ErrorKind::DegenerateMarket,
          "demand is zero at the initial mean price; move the brands into the quadratic region");
  rescale_sales(d);
  for (auto& b : state_.brands) b.supply_s = supply_flow(b.sales_y, b.reproduction_gamma);
  update_fitness(state_, demand_now_, scenario_.params.psi0);
  refresh_aggregates(state_);

  const double mass = inventory_preference_mass(state_);
  state_.consumer_density_psi = mass > 0.0 ? stationary_consumer_density(state_, d).psi_s : 0.0;
  price_variance_ = scenario_.run.variance_mode == VarianceMode::Frozen
                        ? scenario_.run.frozen_variance
                        : ensemble_price_variance(state_.brands, deviations_);
}

void Simulator::rescale_sales(double demand) {
  double total = 0.0;
  for (const auto& b : state_.brands) total += b.sales_y;
  require(total > 0.0, ErrorKind::DegenerateMarket, "total sales are zero");
  const double k = demand / total;
  for (auto& b : state_.brands) b.sales_y *= k;
}

void Simulator::short_step() {
  const auto& run = scenario_.run;
  const double n = state_.adopter_fraction_n;
  for (std::size_t i = 0; i < state_.brands.size(); ++i) {
    double dev = langevin_step(deviations_[i], noise_, state_.regime, run.dt_tau, rng_,
                               run.langevin_scheme);
    dev = reflect_price_floor(dev, reference_price_);
    deviations_[i] = dev;
    state_.brands[i].price_mu = reference_price_ + dev;
  }
  update_fitness(state_, demand_now_, scenario_.params.psi0);
  apply_fitness_perturbation_step(state_, run.dt_tau, run.fitness_shock, rng_);
  for (auto& b : state_.brands) {
    const auto inv = step_inventory(b.inventory_x, b.sales_y, b.reproduction_gamma, run.dt_tau);
    b.inventory_x = inv.inventory;
    if (inv.stock_out) ++last_.stock_outs;
  }
  const double d = demand_rate(reference_price_, state_.time_t, demand_now_, n);
  state_.consumer_density_psi = step_consumer_density(state_.consumer_density_psi, state_, d, run.dt_tau);
}

void Simulator::long_step() {
  const auto& run = scenario_.run;
  last_ = StepInfo{};
  last_.step = steps_done_ + 1;

  for (std::size_t k = 0; k < short_steps_; ++k) short_step();

  price_variance_ = run.variance_mode == VarianceMode::Frozen
                        ? run.frozen_variance
                        : ensemble_price_variance(state_.brands, deviations_);
  MarketMeans means;
  means.eta = 0.0;
  double total = 0.0;
  for (const auto& b : state_.brands) {
    means.eta += b.sales_y * b.preference_eta;
    total += b.sales_y;
  }
  means.eta /= total;
  means.gamma = state_.mean_gamma;
  means.psi0 = scenario_.params.psi0;
  means.price_variance = price_variance_;
  reference_price_ = mean_price_ode_step(reference_price_, scenario_.params, means, run.dt_long);
  require(reference_price_ > 0.0, ErrorKind::DegenerateMarket, "mean price left the positive axis");

  state_.time_t += run.dt_long;
  const double t = state_.time_t;
  demand_now_ = base_demand(scenario_);
  for (const auto& s : scenario_.demand_shocks) {
    if (t >= s.time) demand_now_.d_max *= s.d_max_factor;
  }
  if (run.evolve_adopters) {
    state_.adopter_fraction_n = step_adopters(state_.adopter_fraction_n, run.dt_long, demand_now_);
  }
  const double n = state_.adopter_fraction_n;

  for (std::size_t i = 0; i < state_.brands.size(); ++i) {
    auto& b = state_.brands[i];
    b.reproduction_gamma = policy_.gamma(i, t);
    b.supply_s = supply_flow(b.sales_y, b.reproduction_gamma);
  }
  for (std::size_t i = 0; i < state_.brands.size(); ++i) {
    state_.brands[i].price_mu = reference_price_ + deviations_[i];
  }

  double d = demand_rate(reference_price_, t, demand_now_, n);
  require(d > 0.0, ErrorKind::DegenerateMarket, "demand vanished at the current mean price");
  rescale_sales(d);
  refresh_aggregates(state_);

  last_.t = t;
  last_.demand = d;
  last_.total_supply = aggregate(state_).total_supply;
  last_.mean_gamma = state_.mean_gamma;
  last_.regime = state_.regime;
  last_.price_variance = price_variance_;

  if (state_.regime == Regime::Unstable) {
    const JumpOutcome jump =
        unstable_jump(reference_price_, state_, demand_now_, JumpConfig{run.jump_mean}, rng_);
    last_.jump = jump;
    if (!jump.resolved) {
      status_ = RunStatus::ShortageUnresolved;
      halt_reason_ = "no price jump inside the quadratic demand region restores excess supply at t = " +
                     std::to_string(t);
    } else {
      reference_price_ = jump.mean_price;
      for (std::size_t i = 0; i < state_.brands.size(); ++i) {
        deviations_[i] = reflect_price_floor(deviations_[i], reference_price_);
        state_.brands[i].price_mu = reference_price_ + deviations_[i];
      }
      d = demand_rate(reference_price_, t, demand_now_, n);
      rescale_sales(d);
      refresh_aggregates(state_);
    }
  }
  update_fitness(state_, demand_now_, scenario_.params.psi0);
  refresh_aggregates(state_);
  stock_outs_ += last_.stock_outs;
  ++steps_done_;
}

bool Simulator::step() {
  if (halted()) return false;
  long_step();
  return !halted();
}

Snapshot Simulator::snapshot() const {
  return make_snapshot(state_, deviations_, reference_price_, price_variance_);
}

SimulationResult Simulator::run() {
  SimulationResult result;
  result.trajectory.append(snapshot());
  const auto& run = scenario_.run;
  while (steps_done_ < run.long_steps && !halted()) {
    try {
      long_step();
    } catch (const Error& e) {
      fail(e.kind(), "long step " + std::to_string(steps_done_ + 1) + ": " + e.what());
    }
    if (last_.jump && last_.jump->resolved) {
      result.trajectory.record_jump(JumpEvent{state_.time_t, last_.jump->jump,
                                              last_.jump->mean_price - last_.jump->jump,
                                              last_.jump->mean_price});
    }
    if (steps_done_ % run.snapshot_stride == 0 || halted()) result.trajectory.append(snapshot());
  }
  result.status = status_;
  result.long_steps_done = steps_done_;
  result.stock_outs = stock_outs_;
  result.halt_reason = halt_reason_;
  return result;
}

SimulationResult run_simulation(const Scenario& scenario) {
  Simulator sim(scenario);
  return sim.run();
}

}  // namespace evomarket
