#include "evomarket/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "evomarket/error.hpp"

namespace evomarket {

namespace {

struct ReplicateOutput {
  std::vector<double> sizes;
  std::vector<double> growth;
  double elapsed_tau = 0.0;
  std::optional<std::string> error;
};

ReplicateOutput run_replicate(Scenario sc) {
  ReplicateOutput out;
  try {
    const SimulationResult res = run_simulation(sc);
    const auto& snaps = res.trajectory.snapshots();
    const auto& first = snaps.front();
    const auto& last = snaps.back();
    out.elapsed_tau = last.tau - first.tau;
    for (std::size_t i = 0; i < first.brands.size(); ++i) {
      out.sizes.push_back(last.brands[i].sales_y / first.brands[i].sales_y);
    }
    out.growth = recorded_growth_rates(res.trajectory, 1);
    if (res.status != RunStatus::Completed) out.error = res.halt_reason;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

bool EnsembleReport::passed() const {
  return lognormal && laplace && lognormal->ks_pass && laplace->ks_pass;
}

EnsembleReport run_ensemble(const Scenario& scenario, std::size_t replicates, unsigned threads) {
  require(replicates >= 1, ErrorKind::InvalidParameter, "replicates must be >= 1");
  validate(scenario);

  std::vector<ReplicateOutput> outputs(replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < replicates; r = next++) {
      Scenario sc = scenario;
      sc.params.rng_seed = Rng::derive_seed(scenario.params.rng_seed, r);
      outputs[r] = run_replicate(std::move(sc));
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replicates)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }

  // Pool in replicate order so the report is independent of scheduling.
  EnsembleReport report;
  report.replicates = replicates;
  report.base_seed = scenario.params.rng_seed;
  std::vector<double> sizes;
  std::vector<double> growth;
  for (std::size_t r = 0; r < replicates; ++r) {
    auto& o = outputs[r];
    if (o.error) {
      report.failures.push_back({r, Rng::derive_seed(scenario.params.rng_seed, r), *o.error});
      continue;
    }
    report.elapsed_tau = o.elapsed_tau;
    sizes.insert(sizes.end(), o.sizes.begin(), o.sizes.end());
    growth.insert(growth.end(), o.growth.begin(), o.growth.end());
  }
  report.size_samples = sizes.size();
  report.growth_samples = growth.size();

  try {
    report.lognormal = fit_lognormal(sizes, report.elapsed_tau);
  } catch (const Error& e) {
    report.lognormal_error = e.what();
  }
  try {
    report.laplace = fit_laplace(growth);
  } catch (const Error& e) {
    report.laplace_error = e.what();
  }
  return report;
}

}  // namespace evomarket
