#include "evomarket/replicator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "evomarket/error.hpp"

namespace evomarket {

double fitness(const BrandState& brand, double psi_s_at_price) {
  return brand.preference_eta * brand.reproduction_gamma * psi_s_at_price;
}

double stationary_density_at_price(double price, double t, const DemandParams& demand,
                                   double adopter_fraction, double psi0) {
  return psi0 * demand_rate(price, t, demand, adopter_fraction);
}

void update_fitness(MarketState& state, const DemandParams& demand, double psi0) {
  for (auto& b : state.brands) {
    b.fitness_f = fitness(
        b, stationary_density_at_price(b.price_mu, state.time_t, demand, state.adopter_fraction_n, psi0));
  }
}

FitnessVector summarize_fitness(const MarketState& state) {
  FitnessVector fv;
  fv.values.reserve(state.brands.size());
  double total = 0.0;
  double sum = 0.0;
  for (const auto& b : state.brands) {
    fv.values.push_back(b.fitness_f);
    total += b.sales_y;
    sum += b.sales_y * b.fitness_f;
  }
  require(total > 0.0, ErrorKind::DegenerateMarket, "total sales are zero");
  fv.mean = sum / total;
  double var = 0.0;
  for (const auto& b : state.brands) {
    const double d = b.fitness_f - fv.mean;
    var += b.sales_y * d * d;
  }
  fv.variance = var / total;
  return fv;
}

double fitness_variance(const MarketState& state) { return summarize_fitness(state).variance; }

GrowthRecord growth_record(const MarketState& state, const std::vector<double>& initial_sales) {
  require(initial_sales.size() == state.brands.size(), ErrorKind::PreconditionViolated,
          "growth_record: initial sales size mismatch");
  const FitnessVector fv = summarize_fitness(state);
  GrowthRecord rec;
  for (std::size_t i = 0; i < state.brands.size(); ++i) {
    rec.rates.push_back(fv.values[i] - fv.mean);
    const double y = state.brands[i].sales_y;
    const double y0 = initial_sales[i];
    rec.log_sizes.push_back(y > 0.0 && y0 > 0.0 ? std::log(y / y0) : -INFINITY);
  }
  return rec;
}

void apply_replicator_step(MarketState& state, double dt_tau) {
  require(dt_tau > 0.0, ErrorKind::InvalidParameter, "dt_tau must be positive");
  auto& brands = state.brands;
  double total = 0.0;
  double weighted = 0.0;
  for (const auto& b : brands) {
    require(std::isfinite(b.fitness_f), ErrorKind::InvalidParameter, "fitness must be finite");
    total += b.sales_y;
    weighted += b.sales_y * b.fitness_f;
  }
  require(total > 0.0, ErrorKind::DegenerateMarket, "total sales are zero");
  const double mean_f = weighted / total;

  double max_rate = 0.0;
  for (const auto& b : brands) {
    if (!b.extinct) max_rate = std::max(max_rate, std::abs(b.fitness_f - mean_f));
  }
  if (dt_tau * max_rate >= 1.0) {
    std::ostringstream msg;
    msg << "replicator step too large: dt_tau * max|r_i| = " << dt_tau * max_rate
        << " >= 1; use dt_tau < " << 1.0 / max_rate;
    fail(ErrorKind::StepSize, msg.str());
  }

  const double floor = kExtinctionFraction * total;
  double frozen = 0.0;
  double active = 0.0;
  for (auto& b : brands) {
    if (b.extinct) {
      frozen += b.sales_y;
      continue;
    }
    b.sales_y += (b.fitness_f - mean_f) * b.sales_y * dt_tau;
    if (b.sales_y < floor) {
      b.sales_y = floor;
      b.extinct = true;
      frozen += b.sales_y;
    } else {
      active += b.sales_y;
    }
  }
  require(active > 0.0, ErrorKind::DegenerateMarket, "every brand has gone extinct");
  // Frozen brands keep their floor value; the active ones absorb the rescale.
  const double scale = (total - frozen) / active;
  for (auto& b : brands) {
    if (!b.extinct) b.sales_y *= scale;
  }
  state.time_tau += dt_tau;
  refresh_aggregates(state);
}

MarketState replicator_step(MarketState state, double dt_tau) {
  apply_replicator_step(state, dt_tau);
  return state;
}

double draw_shock(const FitnessShock& shock, Rng& rng) {
  if (shock.sd == 0.0) return 0.0;
  switch (shock.distribution) {
    case ShockDistribution::Normal:
      return shock.sd * rng.normal();
    case ShockDistribution::Uniform:
      return shock.sd * std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

void apply_fitness_perturbation_step(MarketState& state, double dt_tau, const FitnessShock& shock,
                                     Rng& rng) {
  require(shock.sd >= 0.0 && std::isfinite(shock.sd), ErrorKind::InvalidParameter,
          "fitness shock sd must be finite and >= 0");
  if (shock.sd > 0.0) {
    for (auto& b : state.brands) b.fitness_f += draw_shock(shock, rng);
  }
  apply_replicator_step(state, dt_tau);
}

MarketState fitness_perturbation_step(MarketState state, double dt_tau, const FitnessShock& shock,
                                      Rng& rng) {
  apply_fitness_perturbation_step(state, dt_tau, shock, rng);
  return state;
}

LogisticFit substitution_analysis(const Trajectory& trajectory, std::size_t brand_a,
                                  std::size_t brand_b, double epsilon) {
  require(brand_a < trajectory.brand_count() && brand_b < trajectory.brand_count(),
          ErrorKind::InvalidParameter, "substitution_analysis: unknown brand index");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::InvalidParameter,
          "epsilon must lie in (0, 1)");
  std::vector<double> tau;
  std::vector<double> log_ratio;
  for (const auto& s : trajectory.snapshots()) {
    const double ya = s.brands[brand_a].sales_y;
    const double yb = s.brands[brand_b].sales_y;
    require(ya > 0.0 && yb > 0.0, ErrorKind::DegenerateMarket,
            "substitution_analysis: zero sales sample in window");
    tau.push_back(s.tau);
    log_ratio.push_back(std::log(ya / yb));
  }
  const LinearFit fit = linear_fit(tau, log_ratio);
  LogisticFit out;
  out.short_slope = fit.slope;
  out.slope = fit.slope * epsilon;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.count = fit.count;
  return out;
}

namespace {

std::vector<double> run_size_replicate(const SizeEnsembleConfig& cfg, std::size_t replicate,
                                       std::size_t checkpoints) {
  Rng rng(Rng::derive_seed(cfg.seed, replicate));
  MarketState state;
  state.brands.resize(cfg.brands);
  const double share = 1.0 / static_cast<double>(cfg.brands);
  for (auto& b : state.brands) {
    b.sales_y = share;
    b.supply_s = share;
  }
  std::vector<double> out;
  out.reserve(checkpoints);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    for (std::size_t i = 0; i < cfg.brands; ++i) {
      const double base = cfg.base_fitness.empty() ? 0.0 : cfg.base_fitness[i];
      state.brands[i].fitness_f = base;
    }
    apply_fitness_perturbation_step(state, cfg.dt_tau, cfg.shock, rng);
    if (step % cfg.checkpoint_every == 0) {
      out.push_back(std::log(state.brands[0].sales_y / share));
    }
  }
  return out;
}

}  // namespace

SizeEnsembleResult run_size_ensemble(const SizeEnsembleConfig& cfg) {
  require(cfg.replicates >= 1, ErrorKind::InvalidParameter, "replicates must be >= 1");
  require(cfg.brands >= 2, ErrorKind::Monopoly, "ensemble markets need at least two brands");
  require(cfg.checkpoint_every >= 1 && cfg.steps >= cfg.checkpoint_every,
          ErrorKind::InvalidParameter, "checkpoint interval must lie in [1, steps]");
  require(cfg.base_fitness.empty() || cfg.base_fitness.size() == cfg.brands,
          ErrorKind::InvalidParameter, "base_fitness must have one entry per brand");

  const std::size_t checkpoints = cfg.steps / cfg.checkpoint_every;
  std::vector<std::vector<double>> per_replicate(cfg.replicates);
  std::vector<std::exception_ptr> errors(cfg.replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replicates; r = next++) {
      try {
        per_replicate[r] = run_size_replicate(cfg, r, checkpoints);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SizeEnsembleResult result;
  result.log_sizes.assign(checkpoints, std::vector<double>(cfg.replicates));
  for (std::size_t c = 0; c < checkpoints; ++c) {
    result.checkpoint_tau.push_back(static_cast<double>((c + 1) * cfg.checkpoint_every) * cfg.dt_tau);
    for (std::size_t r = 0; r < cfg.replicates; ++r) result.log_sizes[c][r] = per_replicate[r][c];
  }
  return result;
}

}  // namespace evomarket
