#pragma once

// Reproduction relation, inventory balance and the aggregate reproduction
// coefficient deciding the market regime.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace evomarket {

/// Scripted change of the reproduction coefficient from `time` onwards.
struct SupplyShock {
  double time = 0.0;
  double gamma_delta = 0.0;
  std::optional<std::size_t> brand;  // empty: every brand

  bool operator==(const SupplyShock&) const = default;
};

/// Per-brand reproduction coefficient as a function of long-scale time:
/// a constant or scheduled base value plus every shock whose time has passed.
class SupplyPolicy {
 public:
  using Schedule = std::function<double(double)>;

  SupplyPolicy() = default;
  explicit SupplyPolicy(std::vector<double> base_gamma, std::vector<SupplyShock> shocks = {});
  explicit SupplyPolicy(std::vector<Schedule> schedules, std::vector<SupplyShock> shocks = {});

  double gamma(std::size_t brand, double t) const;
  std::size_t brand_count() const { return schedules_.size(); }
  const std::vector<SupplyShock>& shocks() const { return shocks_; }

 private:
  void check_shocks() const;

  std::vector<Schedule> schedules_;
  std::vector<SupplyShock> shocks_;
};

/// s = (1 + gamma) y. Throws Error(InvalidParameter) for gamma < -1 or y < 0.
double supply_flow(double sales_y, double gamma);

struct InventoryUpdate {
  double inventory = 0.0;
  bool stock_out = false;
};

/// x + gamma y dt, clamped at zero; clamping raises the stock-out flag.
InventoryUpdate step_inventory(double inventory_x, double sales_y, double gamma, double dt_tau);

/// <gamma> = s_t / d - 1. Throws Error(DegenerateMarket) when d = 0.
double mean_reproduction(double total_supply, double demand);

}  // namespace evomarket
