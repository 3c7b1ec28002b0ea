#include "evomarket/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "evomarket/error.hpp"

namespace evomarket {

SampleMoments sample_moments(std::span<const double> samples) {
  SampleMoments m;
  m.count = samples.size();
  if (samples.empty()) return m;
  const double n = static_cast<double>(samples.size());
  m.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : samples) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges slowly near zero, where Q is 1 to
  // double precision anyway.
  if (lambda < 0.18) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require(samples.size() >= 5, ErrorKind::InsufficientData, "KS test needs at least 5 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  d = std::clamp(d, 0.0, 1.0);
  const double root_n = std::sqrt(n);
  return {d, kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d)};
}

double laplace_cdf(double x, double location, double scale) {
  const double z = (x - location) / scale;
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorKind::InsufficientData, "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

TentDiagnostic tent_diagnostic(std::span<const double> samples, double center,
                               std::size_t bins_per_side) {
  TentDiagnostic tent;
  if (samples.empty() || bins_per_side < 3) return tent;
  double mad = 0.0;
  for (double x : samples) mad += std::abs(x - center);
  mad /= static_cast<double>(samples.size());
  if (!(mad > 0.0)) return tent;

  // Three mean absolute deviations per side keeps every bin populated for
  // Laplace-like data of a few hundred points or more.
  const double half_width = 3.0 * mad;
  const double bin = half_width / static_cast<double>(bins_per_side);
  std::vector<double> left(bins_per_side, 0.0);
  std::vector<double> right(bins_per_side, 0.0);
  for (double x : samples) {
    const double d = x - center;
    const auto k = static_cast<std::size_t>(std::abs(d) / bin);
    if (k >= bins_per_side) continue;
    (d < 0.0 ? left : right)[k] += 1.0;
  }

  auto side_fit = [&](const std::vector<double>& counts, double sign) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] <= 0.0) continue;
      xs.push_back(sign * (static_cast<double>(k) + 0.5) * bin);
      ys.push_back(std::log(counts[k]));
    }
    if (xs.size() < 3) return LinearFit{};
    return linear_fit(xs, ys);
  };
  const LinearFit lf = side_fit(left, -1.0);
  const LinearFit rf = side_fit(right, 1.0);
  tent.left_slope = lf.slope;
  tent.right_slope = rf.slope;
  tent.left_r_squared = lf.r_squared;
  tent.right_r_squared = rf.r_squared;
  tent.is_tent = lf.slope > 0.0 && rf.slope < 0.0 && lf.r_squared > 0.9 && rf.r_squared > 0.9;
  return tent;
}

FitReport fit_laplace(std::span<const double> samples, double significance) {
  require(samples.size() >= 30, ErrorKind::InsufficientData,
          "Laplace fit needs at least 30 samples");
  FitReport r;
  r.distribution = "laplace";
  r.significance = significance;
  r.count = samples.size();
  r.moments = sample_moments(samples);

  const double location = median(std::vector<double>(samples.begin(), samples.end()));
  double scale = 0.0;
  for (double x : samples) scale += std::abs(x - location);
  scale /= static_cast<double>(samples.size());
  require(scale > 0.0, ErrorKind::DegenerateDistribution,
          "all samples are identical; Laplace scale is zero");

  r.location = location;
  r.scale = scale;
  const double n = static_cast<double>(samples.size());
  r.log_likelihood = -n * std::log(2.0 * scale) - n;
  const KsResult ks =
      ks_statistic(samples, [&](double x) { return laplace_cdf(x, location, scale); });
  r.ks_statistic = ks.statistic;
  r.ks_p_value = ks.p_value;
  r.ks_pass = ks.p_value >= significance;
  r.tent = tent_diagnostic(samples, location);
  return r;
}

FitReport fit_normal(std::span<const double> samples, double significance) {
  require(samples.size() >= 5, ErrorKind::InsufficientData, "normal fit needs at least 5 samples");
  FitReport r;
  r.distribution = "normal";
  r.significance = significance;
  r.count = samples.size();
  r.moments = sample_moments(samples);
  require(r.moments.variance > 0.0, ErrorKind::DegenerateDistribution,
          "all samples are identical; normal scale is zero");
  r.location = r.moments.mean;
  r.scale = std::sqrt(r.moments.variance);
  const double n = static_cast<double>(samples.size());
  r.log_likelihood = -0.5 * n * (std::log(2.0 * std::numbers::pi * r.moments.variance) + 1.0);
  const double mean = r.location;
  const double sd = r.scale;
  const KsResult ks = ks_statistic(samples, [&](double x) { return normal_cdf(x, mean, sd); });
  r.ks_statistic = ks.statistic;
  r.ks_p_value = ks.p_value;
  r.ks_pass = ks.p_value >= significance;
  return r;
}

FitReport fit_lognormal(std::span<const double> sizes, double elapsed_t, double size0,
                        double significance) {
  require(elapsed_t > 0.0, ErrorKind::InvalidParameter, "elapsed time must be positive");
  require(size0 > 0.0, ErrorKind::InvalidParameter, "reference size must be positive");
  require(!sizes.empty(), ErrorKind::InsufficientData, "lognormal fit needs samples");
  std::vector<double> logs;
  logs.reserve(sizes.size());
  double log_sum = 0.0;
  for (double s : sizes) {
    require(s > 0.0 && std::isfinite(s), ErrorKind::InvalidParameter,
            "lognormal fit requires strictly positive sizes");
    logs.push_back(std::log(s / size0));
    log_sum += std::log(s);
  }

  const SampleMoments m = sample_moments(logs);
  FitReport r;
  r.distribution = "lognormal";
  r.significance = significance;
  r.count = sizes.size();
  r.elapsed_t = elapsed_t;
  r.moments = m;
  r.location = m.mean;
  r.drift_u = m.mean / elapsed_t;
  if (!(m.variance > 0.0)) {
    r.degenerate = true;
    r.scale = 0.0;
    r.volatility_omega = 0.0;
    r.ks_pass = false;
    return r;
  }
  r.scale = std::sqrt(m.variance);
  r.volatility_omega = std::sqrt(m.variance / elapsed_t);
  const double n = static_cast<double>(sizes.size());
  r.log_likelihood =
      -0.5 * n * (std::log(2.0 * std::numbers::pi * m.variance) + 1.0) - log_sum;
  const double mean = r.location;
  const double sd = r.scale;
  if (logs.size() >= 5) {
    const KsResult ks = ks_statistic(logs, [&](double x) { return normal_cdf(x, mean, sd); });
    r.ks_statistic = ks.statistic;
    r.ks_p_value = ks.p_value;
    r.ks_pass = ks.p_value >= significance;
  }
  return r;
}

GrowthSamples growth_rates(const Trajectory& trajectory, std::size_t window) {
  require(window >= 1, ErrorKind::InvalidParameter, "growth window must be >= 1 snapshot");
  const auto& snaps = trajectory.snapshots();
  require(snaps.size() > window, ErrorKind::InsufficientData,
          "trajectory too short for the growth window");
  GrowthSamples out;
  for (std::size_t k = 0; k + window < snaps.size(); k += window) {
    const Snapshot& a = snaps[k];
    const Snapshot& b = snaps[k + window];
    const double span = b.tau - a.tau;
    require(span > 0.0, ErrorKind::PreconditionViolated,
            "short-scale time must increase across a growth window");
    for (std::size_t i = 0; i < a.brands.size(); ++i) {
      const double y0 = a.brands[i].sales_y;
      const double y1 = b.brands[i].sales_y;
      if (!(y0 > 0.0) || !(y1 > 0.0)) {
        ++out.skipped;
        continue;
      }
      out.rates.push_back(std::log(y1 / y0) / span);
    }
  }
  return out;
}

std::vector<double> recorded_growth_rates(const Trajectory& trajectory, std::size_t first_snapshot) {
  std::vector<double> rates;
  const auto& snaps = trajectory.snapshots();
  for (std::size_t k = first_snapshot; k < snaps.size(); ++k) {
    for (const auto& b : snaps[k].brands) rates.push_back(b.growth_r);
  }
  return rates;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::PreconditionViolated, "linear_fit: size mismatch");
  require(x.size() >= 2, ErrorKind::InsufficientData, "linear_fit needs two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, ErrorKind::DegenerateDistribution, "linear_fit: constant regressor");
  LinearFit fit;
  fit.count = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (x.size() > 2) fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
  return fit;
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  require(series.size() > max_lag + 1, ErrorKind::InsufficientData,
          "series too short for the requested lags");
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  require(c0 > 0.0, ErrorKind::DegenerateDistribution, "constant series has no autocorrelation");
  std::vector<double> acf(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < series.size(); ++i) {
      c += (series[i] - mean) * (series[i + lag] - mean);
    }
    acf[lag] = c / c0;
  }
  return acf;
}

}  // namespace evomarket
