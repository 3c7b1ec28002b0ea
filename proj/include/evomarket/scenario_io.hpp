#pragma once

// JSON scenario files. Layout:
//
//   {
//     "schema": "evomarket.scenario/1",
//     "params":  { market_potential_M, mean_amount_m, alpha, d_max, mu_nat,
//                  epsilon, psi0, noise_D, response_b },
//     "brands":  [ { sales_y, price_mu, preference_eta, reproduction_gamma,
//                    inventory_x }, ... ],
//     "demand":  { adopter_fraction, bass_p, bass_q, seasonal_amplitude,
//                  seasonal_period },
//     "shocks":  { "supply": [ { time, gamma_delta, brand? } ],
//                  "demand": [ { time, d_max_factor } ] },
//     "run":     { seed, dt_tau, dt_long, long_steps, snapshot_stride,
//                  short_steps_per_long, fitness_shock: { distribution, sd },
//                  variance_mode, frozen_variance, jump_mean,
//                  langevin_scheme, evolve_adopters, ensemble_size },
//     "outputs": { timeseries, report }
//   }
//
// Everything except "brands" is optional and defaults as in Scenario.
// Unknown keys are rejected so typos do not silently fall back to defaults.

#include <filesystem>
#include <string>
#include <string_view>

#include "evomarket/simulation.hpp"

namespace evomarket {

inline constexpr std::string_view kScenarioSchema = "evomarket.scenario/1";

/// Throws Error(ScenarioFormat) with "line L, column C" for syntax errors and
/// the JSON path of the offending field for everything else.
Scenario parse_scenario(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);

/// Pretty-printed JSON; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace evomarket
