#include "evomarket/supply.hpp"

#include <cmath>
#include <string>

#include "evomarket/error.hpp"

namespace evomarket {

SupplyPolicy::SupplyPolicy(std::vector<double> base_gamma, std::vector<SupplyShock> shocks)
    : shocks_(std::move(shocks)) {
  schedules_.reserve(base_gamma.size());
  for (std::size_t i = 0; i < base_gamma.size(); ++i) {
    const double g = base_gamma[i];
    require(std::isfinite(g), ErrorKind::InvalidParameter,
            "gamma of brand " + std::to_string(i) + " must be finite");
    schedules_.emplace_back([g](double) { return g; });
  }
  check_shocks();
}

SupplyPolicy::SupplyPolicy(std::vector<Schedule> schedules, std::vector<SupplyShock> shocks)
    : schedules_(std::move(schedules)), shocks_(std::move(shocks)) {
  for (std::size_t i = 0; i < schedules_.size(); ++i) {
    require(static_cast<bool>(schedules_[i]), ErrorKind::InvalidParameter,
            "gamma schedule of brand " + std::to_string(i) + " is empty");
  }
  check_shocks();
}

void SupplyPolicy::check_shocks() const {
  for (std::size_t k = 0; k < shocks_.size(); ++k) {
    const auto& s = shocks_[k];
    require(std::isfinite(s.time) && std::isfinite(s.gamma_delta), ErrorKind::InvalidParameter,
            "supply shock " + std::to_string(k) + " must have finite time and delta");
    require(!s.brand || *s.brand < schedules_.size(), ErrorKind::InvalidParameter,
            "supply shock " + std::to_string(k) + " names an unknown brand");
  }
}

double SupplyPolicy::gamma(std::size_t brand, double t) const {
  require(brand < schedules_.size(), ErrorKind::InvalidParameter, "unknown brand index");
  double g = schedules_[brand](t);
  for (const auto& s : shocks_) {
    if (t >= s.time && (!s.brand || *s.brand == brand)) g += s.gamma_delta;
  }
  return g;
}

double supply_flow(double sales_y, double gamma) {
  require(sales_y >= 0.0, ErrorKind::InvalidParameter, "sales must be non-negative");
  require(gamma >= -1.0, ErrorKind::InvalidParameter,
          "reproduction coefficient below -1 would give negative supply");
  return (1.0 + gamma) * sales_y;
}

InventoryUpdate step_inventory(double x, double y, double gamma, double dt_tau) {
  const double next = x + gamma * y * dt_tau;
  if (next < 0.0) return {0.0, true};
  return {next, false};
}

double mean_reproduction(double total_supply, double demand) {
  require(demand > 0.0, ErrorKind::DegenerateMarket,
          "mean reproduction is undefined for zero demand");
  return total_supply / demand - 1.0;
}

}  // namespace evomarket
