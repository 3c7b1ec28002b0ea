#include "evomarket/bridge.hpp"

#include <cmath>
#include <sstream>

#include "evomarket/error.hpp"

namespace evomarket {

void validate(const OUParams& p) {
  require(std::isfinite(p.reversion_lambda) && p.reversion_lambda >= 0.0,
          ErrorKind::InvalidParameter, "reversion lambda must be >= 0");
  require(std::isfinite(p.volatility_sigma) && p.volatility_sigma >= 0.0,
          ErrorKind::InvalidParameter, "volatility sigma must be >= 0");
  require(std::isfinite(p.long_term_mean), ErrorKind::InvalidParameter,
          "long-term mean must be finite");
}

void validate(const JumpDiffusionParams& p) {
  validate(p.ou);
  require(std::isfinite(p.jump_frequency_f) && p.jump_frequency_f >= 0.0,
          ErrorKind::InvalidParameter, "jump frequency must be >= 0");
  require(std::isfinite(p.jump_size.mean) && p.jump_size.mean >= 0.0,
          ErrorKind::InvalidParameter, "jump size mean must be >= 0");
}

double draw_jump(const JumpSizeDist& dist, Rng& rng) {
  if (dist.law == JumpLaw::Fixed || dist.mean == 0.0) return dist.mean;
  return rng.exponential(dist.mean);
}

double ou_step(double mu, const OUParams& p, double dt, Rng& rng) {
  require(dt > 0.0, ErrorKind::InvalidParameter, "dt must be positive");
  double next = mu - p.reversion_lambda * (mu - p.long_term_mean) * dt;
  if (p.volatility_sigma > 0.0) next += p.volatility_sigma * std::sqrt(dt) * rng.normal();
  return next;
}

JumpStep jump_diffusion_step(double mu, const JumpDiffusionParams& p, double dt, Rng& rng) {
  require(dt > 0.0, ErrorKind::InvalidParameter, "dt must be positive");
  const double prob = p.jump_frequency_f * dt;
  if (prob > kMaxJumpProbability) {
    std::ostringstream msg;
    msg << "jump probability f*dt = " << prob << " exceeds " << kMaxJumpProbability
        << "; refine dt below " << kMaxJumpProbability / p.jump_frequency_f;
    fail(ErrorKind::StepSize, msg.str());
  }
  const double sigma = p.pilipovic_mode ? p.ou.volatility_sigma * mu : p.ou.volatility_sigma;
  JumpStep out;
  out.price = mu - p.ou.reversion_lambda * (mu - p.ou.long_term_mean) * dt;
  if (sigma != 0.0) out.price += sigma * std::sqrt(dt) * rng.normal();
  // The arrival draw happens only when jumps are enabled, so f = 0 consumes
  // the same random numbers as ou_step.
  if (prob > 0.0 && rng.uniform() < prob) {
    out.price += draw_jump(p.jump_size, rng);
    out.jumped = true;
  }
  return out;
}

OUEstimate calibrate_ou(std::span<const double> series, double dt) {
  require(dt > 0.0, ErrorKind::InvalidParameter, "dt must be positive");
  require(series.size() >= 100, ErrorKind::InsufficientData,
          "OU calibration needs at least 100 samples");
  const std::size_t m = series.size() - 1;
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sx += series[k];
    sy += series[k + 1];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = series[k] - mx;
    sxx += dx * dx;
    sxy += dx * (series[k + 1] - my);
  }
  require(sxx > 0.0, ErrorKind::DegenerateDistribution, "constant series cannot be calibrated");
  double phi = sxy / sxx;
  const double c = my - phi * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double e = series[k + 1] - c - phi * series[k];
    sse += e * e;
  }
  const double resid_var = sse / static_cast<double>(m - 2);
  const double phi_se = std::sqrt(resid_var / sxx);
  require(phi < 1.0, ErrorKind::InsufficientData,
          "AR(1) coefficient >= 1: the series shows no mean reversion");
  // A non-positive coefficient means the series decorrelates within one step;
  // the reversion rate is then only bounded from below.
  const double phi_used = phi > 1e-12 ? phi : 1e-12;

  OUEstimate est;
  est.ar1_coefficient = phi;
  auto& p = est.params;
  p.reversion_lambda = -std::log(phi_used) / dt;
  p.long_term_mean = c / (1.0 - phi);
  const double one_minus_phi2 = 1.0 - phi_used * phi_used;
  p.volatility_sigma = std::sqrt(resid_var * 2.0 * p.reversion_lambda / one_minus_phi2);

  // Delta method on phi; sigma's error is dominated by the residual variance.
  est.lambda_stderr = phi_se / (phi_used * dt);
  est.sigma_stderr = p.volatility_sigma / std::sqrt(2.0 * static_cast<double>(m));
  est.mean_stderr = std::sqrt(resid_var / one_minus_phi2 / static_cast<double>(m)) *
                    std::sqrt((1.0 + phi_used) / (1.0 - phi_used));
  return est;
}

}  // namespace evomarket
