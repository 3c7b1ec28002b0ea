#include "evomarket/plot_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "evomarket/error.hpp"
#include "evomarket/price.hpp"
#include "evomarket/timeseries_io.hpp"

namespace evomarket {

namespace {

constexpr std::array<std::pair<std::string_view, PlotKind>, 4> kKinds = {{
    {"price_path", PlotKind::PricePath},
    {"demand_supply_curves", PlotKind::DemandSupplyCurves},
    {"log_share_ratio", PlotKind::LogShareRatio},
    {"price_histogram", PlotKind::PriceHistogram},
}};

void price_path(std::ostream& out, const Trajectory& traj) {
  out << "t,mean_price\n";
  for (const auto& s : traj.snapshots()) {
    out << format_number(s.t) << ',' << format_number(s.mean_price) << '\n';
  }
}

void demand_supply(std::ostream& out, const Trajectory& traj, const PlotOptions& opt) {
  require(opt.grid_points >= 2, ErrorKind::InvalidParameter, "grid_points must be >= 2");
  const auto& last = traj.snapshots().back();
  const auto& dp = opt.demand;
  double lo = opt.mu_min, hi = opt.mu_max;
  if (!(lo < hi)) {
    const double half = dp.alpha > 0.0 ? std::sqrt(dp.d_max * seasonal_factor(last.t, dp) / dp.alpha)
                                       : 1.0;
    lo = std::max(0.0, dp.mu_nat - 1.1 * half);
    hi = dp.mu_nat + 1.1 * half;
  }
  const auto clearing = clearing_price(last.total_supply, last.t, dp, opt.adopter_fraction);
  out << "# t=" << format_number(last.t) << " supply=" << format_number(last.total_supply)
      << " clearing_price=" << (clearing ? format_number(*clearing) : std::string("none")) << '\n';
  out << "mu,demand,supply\n";
  for (std::size_t k = 0; k < opt.grid_points; ++k) {
    const double mu = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(opt.grid_points - 1);
    out << format_number(mu) << ',' << format_number(demand_rate(mu, last.t, dp, opt.adopter_fraction))
        << ',' << format_number(last.total_supply) << '\n';
  }
}

void log_share_ratio(std::ostream& out, const Trajectory& traj, const PlotOptions& opt) {
  require(opt.brand_a < traj.brand_count() && opt.brand_b < traj.brand_count(),
          ErrorKind::InvalidParameter, "log_share_ratio: brand index out of range");
  out << "t,log_share_ratio\n";
  for (const auto& s : traj.snapshots()) {
    const double ya = s.brands[opt.brand_a].sales_y;
    const double yb = s.brands[opt.brand_b].sales_y;
    require(ya > 0.0 && yb > 0.0, ErrorKind::DegenerateMarket, "log_share_ratio: zero sales sample");
    out << format_number(s.t) << ',' << format_number(std::log(ya / yb)) << '\n';
  }
}

void histogram(std::ostream& out, const Trajectory& traj, const PlotOptions& opt) {
  require(opt.bins >= 1, ErrorKind::InvalidParameter, "bins must be >= 1");
  std::vector<double> devs;
  for (const auto& s : traj.snapshots()) {
    for (const auto& b : s.brands) devs.push_back(b.price_deviation);
  }
  const auto [mn, mx] = std::minmax_element(devs.begin(), devs.end());
  // Symmetric range so the centre bin sits on zero deviation.
  const double half = std::max(std::abs(*mn), std::abs(*mx));
  const double width = half > 0.0 ? 2.0 * half / static_cast<double>(opt.bins) : 1.0;
  std::vector<std::size_t> counts(opt.bins, 0);
  for (double d : devs) {
    auto k = static_cast<std::ptrdiff_t>(std::floor((d + half) / width));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(opt.bins) - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  out << "bin_center,count\n";
  for (std::size_t k = 0; k < opt.bins; ++k) {
    out << format_number(-half + (static_cast<double>(k) + 0.5) * width) << ',' << counts[k] << '\n';
  }
}

}  // namespace

std::string_view to_string(PlotKind kind) {
  for (const auto& [name, k] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

PlotKind parse_plot_kind(std::string_view name) {
  std::string valid;
  for (const auto& [n, k] : kKinds) {
    if (n == name) return k;
    valid += (valid.empty() ? "" : ", ") + std::string(n);
  }
  fail(ErrorKind::InvalidParameter,
       "unknown plot kind '" + std::string(name) + "'; valid kinds: " + valid);
}

std::string emit_plot_data(const Trajectory& traj, PlotKind kind, const PlotOptions& opt) {
  require(!traj.empty(), ErrorKind::InsufficientData, "cannot plot an empty trajectory");
  std::ostringstream out;
  switch (kind) {
    case PlotKind::PricePath: price_path(out, traj); break;
    case PlotKind::DemandSupplyCurves: demand_supply(out, traj, opt); break;
    case PlotKind::LogShareRatio: log_share_ratio(out, traj, opt); break;
    case PlotKind::PriceHistogram: histogram(out, traj, opt); break;
  }
  return out.str();
}

}  // namespace evomarket
