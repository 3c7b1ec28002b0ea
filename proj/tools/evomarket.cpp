// evomarket: run scenarios, ensembles, fits and plot-data exports.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure,
// 3 statistical check failed (ensemble --check).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evomarket/ensemble.hpp"
#include "evomarket/error.hpp"
#include "evomarket/estimators.hpp"
#include "evomarket/plot_data.hpp"
#include "evomarket/report_io.hpp"
#include "evomarket/scenario_io.hpp"
#include "evomarket/simulation.hpp"
#include "evomarket/timeseries_io.hpp"

namespace fs = std::filesystem;
using namespace evomarket;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;
constexpr int kStatFail = 3;

struct Common {
  std::string scenario;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

// Loading and validation errors map to exit code 1; everything after to 2.
struct InputError {
  std::string message;
};

Scenario load(const Common& c) {
  try {
    Scenario sc = load_scenario(c.scenario);
    if (c.seed) sc.params.rng_seed = *c.seed;
    return sc;
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
}

fs::path output_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

int cmd_simulate(const Common& c, std::optional<std::size_t> steps) {
  Scenario sc = load(c);
  if (steps) sc.run.long_steps = *steps;
  const SimulationResult res = run_simulation(sc);
  const fs::path path = output_path(c, sc.outputs.timeseries);
  save_timeseries(path, res.trajectory);
  const auto& last = res.trajectory.snapshots().back();
  std::cout << "status " << to_string(res.status) << '\n'
            << "long steps " << res.long_steps_done << '\n'
            << "snapshots " << res.trajectory.size() << '\n'
            << "final mean price " << format_number(last.mean_price) << '\n'
            << "final regime " << to_string(last.regime) << '\n'
            << "jumps " << res.trajectory.jumps().size() << '\n'
            << "stock-outs " << res.stock_outs << '\n'
            << "wrote " << path.string() << '\n';
  if (res.status != RunStatus::Completed) std::cerr << "halted: " << res.halt_reason << '\n';
  return kOk;
}

int cmd_ensemble(const Common& c, std::optional<std::size_t> replicates, unsigned threads, bool check) {
  const Scenario sc = load(c);
  const std::size_t n = replicates.value_or(sc.run.ensemble_size);
  const EnsembleReport report = run_ensemble(sc, n, threads);
  const fs::path path = output_path(c, sc.outputs.report);
  write_text_file(path, ensemble_report_json(report));
  std::cout << "replicates " << report.replicates << " (failed " << report.failures.size() << ")\n";
  if (report.lognormal) {
    std::cout << "lognormal sizes: u " << format_number(report.lognormal->drift_u) << ", omega "
              << format_number(report.lognormal->volatility_omega) << ", KS p "
              << format_number(report.lognormal->ks_p_value)
              << (report.lognormal->ks_pass ? " pass" : " FAIL") << '\n';
  } else {
    std::cout << "lognormal sizes: " << report.lognormal_error << '\n';
  }
  if (report.laplace) {
    std::cout << "laplace growth rates: scale " << format_number(report.laplace->scale)
              << ", excess kurtosis " << format_number(report.laplace->moments.excess_kurtosis)
              << ", KS p " << format_number(report.laplace->ks_p_value)
              << (report.laplace->ks_pass ? " pass" : " FAIL") << '\n';
  } else {
    std::cout << "laplace growth rates: " << report.laplace_error << '\n';
  }
  std::cout << "wrote " << path.string() << '\n';
  return check && !report.passed() ? kStatFail : kOk;
}

struct FitArgs {
  std::string series;
  std::string quantity = "growth";
  std::string column;
  std::string distribution = "laplace";
  double significance = kDefaultSignificance;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  TimeSeriesTable table;
  try {
    table = load_timeseries(a.series);
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
  const Trajectory traj = trajectory_from_table(table);
  std::vector<double> samples;
  FitReport report;
  if (a.quantity == "size") {
    const auto& first = traj.snapshots().front();
    const auto& last = traj.snapshots().back();
    for (std::size_t i = 0; i < traj.brand_count(); ++i) {
      samples.push_back(last.brands[i].sales_y / first.brands[i].sales_y);
    }
    report = fit_lognormal(samples, last.tau - first.tau, 1.0, a.significance);
  } else {
    if (a.quantity == "growth") {
      samples = recorded_growth_rates(traj, 1);
    } else if (a.quantity == "deviation") {
      for (const auto& s : traj.snapshots())
        for (const auto& b : s.brands) samples.push_back(b.price_deviation);
    } else if (a.quantity == "column") {
      if (a.column.empty()) throw InputError{"--quantity column needs --column NAME"};
      try {
        samples = table.column(a.column);
      } catch (const Error& e) {
        throw InputError{e.what()};
      }
    }
    if (a.distribution == "laplace") report = fit_laplace(samples, a.significance);
    else if (a.distribution == "normal") report = fit_normal(samples, a.significance);
    else report = fit_lognormal(samples, traj.snapshots().back().tau, 1.0, a.significance);
  }
  const std::string json = fit_report_json(report);
  if (a.out.empty()) {
    std::cout << json;
  } else {
    write_text_file(a.out, json);
    std::cout << "wrote " << a.out << '\n';
  }
  return kOk;
}

struct PlotArgs {
  std::string kind;
  std::string series;
  std::string out;
  PlotOptions options;
};

int cmd_plot(const Common& c, PlotArgs a) {
  PlotKind kind;
  try {
    kind = parse_plot_kind(a.kind);
  } catch (const Error& e) {
    throw InputError{e.what()};
  }
  Trajectory traj;
  if (!c.scenario.empty()) {
    const Scenario sc = load(c);
    a.options.demand = sc.demand;
    a.options.adopter_fraction = sc.adopter_fraction;
    traj = run_simulation(sc).trajectory;
  } else if (!a.series.empty()) {
    try {
      traj = trajectory_from_table(load_timeseries(a.series));
    } catch (const Error& e) {
      throw InputError{e.what()};
    }
  } else {
    throw InputError{"plot needs --scenario or --series"};
  }
  const std::string data = emit_plot_data(traj, kind, a.options);
  if (a.out.empty()) {
    std::cout << data;
  } else {
    write_text_file(a.out, data);
    std::cout << "wrote " << a.out << '\n';
  }
  return kOk;
}

int cmd_validate(const Common& c) {
  const Scenario sc = load(c);
  std::cout << c.scenario << ": ok (" << sc.brands.size() << " brands, " << sc.run.long_steps
            << " long steps)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary consumer-market simulator"};
  app.require_subcommand(1);

  Common common;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> replicates;
  unsigned threads = 1;
  bool check = false;
  FitArgs fit;
  PlotArgs plot;

  auto add_common = [&](CLI::App* sub, bool scenario_required) {
    auto* opt = sub->add_option("-s,--scenario", common.scenario, "scenario JSON file");
    if (scenario_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", common.out_dir, "output directory");
    sub->add_option("--seed", common.seed, "override the scenario seed");
  };

  auto* simulate = app.add_subcommand("simulate", "run one scenario and write its time series");
  add_common(simulate, true);
  simulate->add_option("--steps", steps, "override the number of long steps");

  auto* ensemble = app.add_subcommand("ensemble", "run seeded replicates and write a fit report");
  add_common(ensemble, true);
  ensemble->add_option("-n,--replicates", replicates, "replicate count (default: run.ensemble_size)");
  ensemble->add_option("-j,--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  ensemble->add_flag("--check", check, "exit with 3 when a KS test fails");

  auto* fitcmd = app.add_subcommand("fit", "fit a distribution to data from a time-series file");
  fitcmd->add_option("--series", fit.series, "time-series CSV")->required()->check(CLI::ExistingFile);
  fitcmd->add_option("--quantity", fit.quantity, "growth | deviation | size | column")
      ->check(CLI::IsMember({"growth", "deviation", "size", "column"}));
  fitcmd->add_option("--column", fit.column, "column name for --quantity column");
  fitcmd->add_option("--distribution", fit.distribution, "laplace | normal | lognormal")
      ->check(CLI::IsMember({"laplace", "normal", "lognormal"}));
  fitcmd->add_option("--significance", fit.significance, "KS significance level")
      ->check(CLI::Range(1e-6, 0.5));
  fitcmd->add_option("-o,--out", fit.out, "report file (default: stdout)");

  auto* plotcmd = app.add_subcommand("plot", "emit plot data from a scenario run or a series file");
  add_common(plotcmd, false);
  plotcmd->add_option("--kind", plot.kind,
                      "price_path | demand_supply_curves | log_share_ratio | price_histogram")
      ->required();
  plotcmd->add_option("--series", plot.series, "time-series CSV instead of a scenario");
  plotcmd->add_option("--file", plot.out, "output file (default: stdout)");
  plotcmd->add_option("--bins", plot.options.bins, "histogram bins");
  plotcmd->add_option("--grid", plot.options.grid_points, "price grid points");
  plotcmd->add_option("--mu-min", plot.options.mu_min, "price grid start");
  plotcmd->add_option("--mu-max", plot.options.mu_max, "price grid end");
  plotcmd->add_option("--brand-a", plot.options.brand_a, "numerator brand");
  plotcmd->add_option("--brand-b", plot.options.brand_b, "denominator brand");

  auto* validatecmd = app.add_subcommand("validate", "parse and validate a scenario file");
  add_common(validatecmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*simulate) return cmd_simulate(common, steps);
    if (*ensemble) return cmd_ensemble(common, replicates, threads, check);
    if (*fitcmd) return cmd_fit(fit);
    if (*plotcmd) return cmd_plot(common, plot);
    if (*validatecmd) return cmd_validate(common);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.message << '\n';
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
