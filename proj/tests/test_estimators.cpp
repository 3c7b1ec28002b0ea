#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evomarket/error.hpp"
#include "evomarket/estimators.hpp"
#include "evomarket/rng.hpp"

using namespace evomarket;

namespace {

std::vector<double> laplace_sample(std::size_t n, double loc, double scale, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = rng.exponential(scale);
    xs.push_back(loc + (rng.uniform() < 0.5 ? -e : e));
  }
  return xs;
}

}  // namespace

TEST_CASE("sample moments") {
  const std::vector<double> xs = {1, 2, 3, 4};
  const auto m = sample_moments(xs);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.variance == doctest::Approx(1.25));
  CHECK(m.skewness == doctest::Approx(0.0));
  CHECK(m.count == 4);
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("Laplace fit of three points") {
  std::vector<double> xs;
  for (int k = 0; k < 10; ++k) xs.insert(xs.end(), {-1.0, 0.0, 1.0});
  const auto r = fit_laplace(xs);
  CHECK(r.location == doctest::Approx(0.0));
  CHECK(r.scale == doctest::Approx(2.0 / 3.0));
  CHECK(r.distribution == "laplace");
}

TEST_CASE("Laplace fit rejects small and constant samples") {
  try {
    fit_laplace(std::vector<double>(10, 0.0));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  try {
    fit_laplace(std::vector<double>(100, 0.5));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDistribution);
  }
}

TEST_CASE("Laplace fit recovers parameters and passes KS") {
  const auto xs = laplace_sample(20000, 0.3, 0.1, 17);
  const auto r = fit_laplace(xs);
  CHECK(r.location == doctest::Approx(0.3).epsilon(0.01));
  CHECK(r.scale == doctest::Approx(0.1).epsilon(0.03));
  CHECK(r.ks_pass);
  CHECK(r.moments.excess_kurtosis == doctest::Approx(3.0).epsilon(0.25));
  REQUIRE(r.tent.has_value());
  CHECK(r.tent->is_tent);
  CHECK(r.tent->left_slope > 0.0);
  CHECK(r.tent->right_slope < 0.0);
}

TEST_CASE("Laplace scale error shrinks with the sample size") {
  auto err = [](std::size_t n) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 40; ++s) {
      const auto xs = laplace_sample(n, 0.0, 1.0, 100 + s);
      total += std::abs(fit_laplace(xs).scale - 1.0);
    }
    return total / 40.0;
  };
  CHECK(err(10000) < err(100));
}

TEST_CASE("normal sample fails the Laplace KS test") {
  Rng rng(5);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(rng.normal());
  CHECK_FALSE(fit_laplace(xs).ks_pass);
  const auto n = fit_normal(xs);
  CHECK(n.ks_pass);
  CHECK(n.scale == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("KS statistic geometry") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  // Points at (i - 0.5) / n: D = 1 / (2n).
  std::vector<double> mid;
  for (int i = 1; i <= 10; ++i) mid.push_back((i - 0.5) / 10.0);
  CHECK(ks_statistic(mid, uniform).statistic == doctest::Approx(0.05));
  // Everything at 0: D = 1.
  CHECK(ks_statistic(std::vector<double>(10, 0.0), uniform).statistic == doctest::Approx(1.0));
  CHECK(ks_statistic(std::vector<double>(50, 0.0), uniform).p_value < 1e-6);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>(3, 0.0), uniform), Error);
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.049).epsilon(0.02));
  CHECK(kolmogorov_survival(1.63) == doctest::Approx(0.0098).epsilon(0.03));
  CHECK(kolmogorov_survival(5.0) < 1e-15);
}

TEST_CASE("KS p-values are roughly uniform under the null") {
  int rejects = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    Rng rng(1000 + t);
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(rng.uniform());
    if (ks_statistic(xs, [](double x) { return x; }).p_value < 0.05) ++rejects;
  }
  CHECK(rejects >= 8);
  CHECK(rejects <= 35);
}

TEST_CASE("CDFs") {
  CHECK(laplace_cdf(0.0, 0.0, 1.0) == 0.5);
  CHECK(laplace_cdf(1.0, 0.0, 1.0) == doctest::Approx(1.0 - 0.5 * std::exp(-1.0)));
  CHECK(laplace_cdf(-1.0, 0.0, 1.0) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(normal_cdf(0.0, 0.0, 1.0) == 0.5);
  CHECK(normal_cdf(1.96, 0.0, 1.0) == doctest::Approx(0.975).epsilon(1e-4));
}

TEST_CASE("lognormal fit") {
  Rng rng(12);
  const double t = 4.0, u = 0.05, w = 0.2;
  std::vector<double> sizes;
  for (int i = 0; i < 20000; ++i) sizes.push_back(std::exp(u * t + w * std::sqrt(t) * rng.normal()));
  const auto r = fit_lognormal(sizes, t);
  CHECK(r.drift_u == doctest::Approx(u).epsilon(0.05));
  CHECK(r.volatility_omega == doctest::Approx(w).epsilon(0.02));
  CHECK(r.ks_pass);
  CHECK(r.distribution == "lognormal");

  // A common factor on sizes and the reference size leaves the fit unchanged.
  auto scaled = sizes;
  for (auto& s : scaled) s *= 7.0;
  const auto r2 = fit_lognormal(scaled, t, 7.0);
  CHECK(r2.drift_u == doctest::Approx(r.drift_u).epsilon(1e-10));
  CHECK(r2.volatility_omega == doctest::Approx(r.volatility_omega).epsilon(1e-10));

  const auto flat = fit_lognormal(std::vector<double>(20, 2.0), 1.0, 2.0);
  CHECK(flat.degenerate);
  CHECK(flat.volatility_omega == 0.0);
  CHECK(flat.drift_u == 0.0);

  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{1.0, -1.0, 2.0, 3.0, 4.0}, 1.0), Error);
  CHECK_THROWS_AS(fit_lognormal(sizes, 0.0), Error);
}

TEST_CASE("growth rates from a trajectory") {
  // y_0 = e^{0.1 tau}, y_1 = e^{-0.1 tau} (unnormalised on purpose).
  Trajectory traj;
  for (int k = 0; k <= 10; ++k) {
    MarketState st;
    st.time_tau = k * 0.5;
    st.time_t = st.time_tau * 0.02;
    for (double g : {0.1, -0.1}) {
      BrandState b;
      b.sales_y = std::exp(g * st.time_tau);
      st.brands.push_back(b);
    }
    refresh_aggregates(st);
    traj.append(make_snapshot(st, {}, 1.0, 0.0));
  }
  const auto g = growth_rates(traj, 2);
  REQUIRE(g.rates.size() == 2 * 5);
  for (std::size_t i = 0; i < g.rates.size(); ++i) {
    CHECK(std::abs(g.rates[i] - (i % 2 == 0 ? 0.1 : -0.1)) <= 1e-9);
  }
  CHECK(g.skipped == 0);
}

TEST_CASE("linear fit and autocorrelation") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  const std::vector<double> y = {1, 3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));

  Rng rng(3);
  std::vector<double> ar;
  double v = 0.0;
  for (int i = 0; i < 50000; ++i) {
    v = 0.8 * v + rng.normal();
    ar.push_back(v);
  }
  const auto ac = autocorrelation(ar, 3);
  CHECK(ac[0] == doctest::Approx(1.0));
  CHECK(ac[1] == doctest::Approx(0.8).epsilon(0.02));
  CHECK(ac[2] == doctest::Approx(0.64).epsilon(0.04));
}
