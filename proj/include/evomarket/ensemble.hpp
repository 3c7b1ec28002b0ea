#pragma once

// Independent seeded replicates of a scenario, pooled into size and
// growth-rate statistics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evomarket/estimators.hpp"
#include "evomarket/simulation.hpp"

namespace evomarket {

struct ReplicateFailure {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct EnsembleReport {
  std::size_t replicates = 0;
  std::uint64_t base_seed = 0;
  double elapsed_tau = 0.0;
  std::size_t size_samples = 0;
  std::size_t growth_samples = 0;
  std::optional<FitReport> lognormal;  // final sizes y_i(T) / y_i(0)
  std::optional<FitReport> laplace;    // recorded growth rates r_i
  std::string lognormal_error;
  std::string laplace_error;
  std::vector<ReplicateFailure> failures;

  /// Both fits present and passing their KS tests.
  bool passed() const;
};

/// Replicate r runs the scenario with seed Rng::derive_seed(base, r), so the
/// report does not depend on `threads`. Failed replicates are listed and left
/// out of the pools.
EnsembleReport run_ensemble(const Scenario& scenario, std::size_t replicates, unsigned threads = 1);

}  // namespace evomarket
