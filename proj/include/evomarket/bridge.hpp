#pragma once

// Reduced spot-price models: Ornstein-Uhlenbeck mean reversion and a
// Poisson jump-diffusion, plus AR(1) calibration of the former.

#include <span>

#include "evomarket/rng.hpp"

namespace evomarket {

struct OUParams {
  double reversion_lambda = 0.5;
  double volatility_sigma = 0.1;
  double long_term_mean = 1.0;
};

void validate(const OUParams& params);

enum class JumpLaw { Exponential, Fixed };

struct JumpSizeDist {
  JumpLaw law = JumpLaw::Exponential;
  double mean = 0.05;
};

double draw_jump(const JumpSizeDist& dist, Rng& rng);

struct JumpDiffusionParams {
  OUParams ou;
  double jump_frequency_f = 0.0;
  JumpSizeDist jump_size;
  bool pilipovic_mode = false;  // volatility sigma * mu instead of sigma
};

void validate(const JumpDiffusionParams& params);

/// Euler-Maruyama: mu - lambda (mu - mean) dt + sigma sqrt(dt) xi.
double ou_step(double mu, const OUParams& params, double dt, Rng& rng);

struct JumpStep {
  double price = 0.0;
  bool jumped = false;
};

/// Diffusion step plus, with probability f dt, a jump. Throws
/// Error(StepSize) when f dt > 0.1.
JumpStep jump_diffusion_step(double mu, const JumpDiffusionParams& params, double dt, Rng& rng);

/// Largest per-step jump probability f dt accepted by the Bernoulli thinning.
inline constexpr double kMaxJumpProbability = 0.1;

struct OUEstimate {
  OUParams params;
  double lambda_stderr = 0.0;
  double sigma_stderr = 0.0;
  double mean_stderr = 0.0;
  double ar1_coefficient = 0.0;
};

/// Fits x_{k+1} = c + phi x_k + e and inverts the exact OU discretization:
/// lambda = -ln(phi)/dt, mean = c/(1 - phi), sigma^2 = Var(e) 2 lambda / (1 - phi^2).
/// Requires >= 100 samples. Throws Error(DegenerateDistribution) for a
/// constant series and Error(InsufficientData) when phi >= 1 (no reversion).
OUEstimate calibrate_ou(std::span<const double> series, double dt);

}  // namespace evomarket
