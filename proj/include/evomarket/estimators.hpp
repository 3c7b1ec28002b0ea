#pragma once

// Distribution fitting and goodness-of-fit checks for the emergent laws:
// Laplace price deviations and growth rates, lognormal sizes.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evomarket/market_core.hpp"

namespace evomarket {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // population (1/n) variance
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t count = 0;
};

SampleMoments sample_moments(std::span<const double> samples);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample-free KS test of `samples` against a reference CDF. The p-value
/// uses the asymptotic Kolmogorov distribution with Stephens' small-sample
/// correction. Requires at least 5 samples.
KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

double laplace_cdf(double x, double location, double scale);
double normal_cdf(double x, double mean, double sd);

/// Log-density linearity on each side of the median; a Laplace sample shows
/// a rising left flank, a falling right flank and high r^2 on both.
struct TentDiagnostic {
  double left_slope = 0.0;
  double right_slope = 0.0;
  double left_r_squared = 0.0;
  double right_r_squared = 0.0;
  bool is_tent = false;
};

struct FitReport {
  std::string distribution;
  double location = 0.0;  // Laplace location or normal mean (of logs for lognormal)
  double scale = 0.0;     // Laplace scale or normal standard deviation
  double drift_u = 0.0;            // lognormal only: mean log growth per unit time
  double volatility_omega = 0.0;   // lognormal only: sqrt(log variance per unit time)
  double elapsed_t = 0.0;
  double log_likelihood = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  double significance = 0.01;
  bool ks_pass = false;
  SampleMoments moments;
  std::size_t count = 0;
  std::optional<TentDiagnostic> tent;
  bool degenerate = false;
};

inline constexpr double kDefaultSignificance = 0.01;

/// Laplace MLE: location = sample median, scale = mean absolute deviation
/// from it. Requires >= 30 samples, not all identical.
FitReport fit_laplace(std::span<const double> samples, double significance = kDefaultSignificance);

/// Normal MLE with a KS check. Requires >= 5 samples, not all identical.
FitReport fit_normal(std::span<const double> samples, double significance = kDefaultSignificance);

/// Fits a normal law to ln(size / size0) and reports u = mean / t and
/// omega^2 = variance / t. All sizes equal to size0 yields a degenerate report
/// with u = omega = 0.
FitReport fit_lognormal(std::span<const double> sizes, double elapsed_t, double size0 = 1.0,
                        double significance = kDefaultSignificance);

TentDiagnostic tent_diagnostic(std::span<const double> samples, double center,
                               std::size_t bins_per_side = 12);

struct GrowthSamples {
  std::vector<double> rates;
  std::size_t skipped = 0;  // brand windows with zero sales
};

/// ln(y_i(tau + w) / y_i(tau)) / w over windows of `window` snapshots, pooled
/// over brands and windows. Windows with non-positive sales are skipped and
/// counted.
GrowthSamples growth_rates(const Trajectory& trajectory, std::size_t window);

/// Instantaneous growth rates r_i = f_i - <f> recorded in each snapshot.
std::vector<double> recorded_growth_rates(const Trajectory& trajectory, std::size_t first_snapshot = 1);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t count = 0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Sample autocorrelation for lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

double median(std::vector<double> values);

}  // namespace evomarket
