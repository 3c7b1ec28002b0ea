#include <doctest.h>

#include <cmath>

#include "evomarket/error.hpp"
#include "evomarket/estimators.hpp"
#include "evomarket/price.hpp"

using namespace evomarket;

namespace {

// Simpson's rule oracle.
double integrate(auto f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

DemandParams demand(double alpha, double d_max, double mu_nat) {
  DemandParams d;
  d.alpha = alpha;
  d.d_max = d_max;
  d.mu_nat = mu_nat;
  return d;
}

MarketState two_brand_market(double supply_total, double mean_price) {
  MarketState st;
  for (int i = 0; i < 2; ++i) {
    BrandState b;
    b.sales_y = 0.5;
    b.supply_s = supply_total / 2.0;
    b.price_mu = mean_price;
    st.brands.push_back(b);
  }
  refresh_aggregates(st);
  return st;
}

}  // namespace

TEST_CASE("restoring force") {
  CHECK(restoring_force(0.0, Regime::Stable, 0.1) == 0.0);
  CHECK(restoring_force(0.0, Regime::Unstable, 0.1) == 0.0);
  CHECK(restoring_force(0.05, Regime::Stable, 0.1) == doctest::Approx(-0.1));
  CHECK(restoring_force(-0.05, Regime::Stable, 0.1) == doctest::Approx(0.1));
  CHECK(restoring_force(0.05, Regime::Unstable, 0.1) == doctest::Approx(0.1));
}

TEST_CASE("deterministic Langevin steps") {
  Rng rng(1);
  NoiseModel quiet{0.0, 0.1};
  for (auto scheme : {LangevinScheme::Exact, LangevinScheme::Splitting, LangevinScheme::EulerMaruyama}) {
    CHECK(langevin_step(0.0, quiet, Regime::Stable, 1.0, rng, scheme) == 0.0);
    CHECK(langevin_step(0.3, quiet, Regime::Stable, 1.0, rng, scheme) == doctest::Approx(0.2));
    CHECK(langevin_step(-0.3, quiet, Regime::Unstable, 1.0, rng, scheme) == doctest::Approx(-0.4));
  }
}

TEST_CASE("unstable regime without noise never shrinks deviations") {
  Rng rng(1);
  NoiseModel quiet{0.0, 0.1};
  double x = 0.01, prev = std::abs(x);
  for (int k = 0; k < 1000; ++k) {
    x = langevin_step(x, quiet, Regime::Unstable, 0.1, rng);
    CHECK(std::abs(x) >= prev);
    prev = std::abs(x);
  }
}

TEST_CASE("price floor reflects") {
  CHECK(reflect_price_floor(0.1, 1.0) == 0.1);
  const double d = reflect_price_floor(-1.5, 1.0);
  CHECK(1.0 + d > 0.0);
  CHECK(1.0 + d == doctest::Approx(0.5 + 2e-9));
}

TEST_CASE("stationary Laplace density") {
  NoiseModel n{0.02, 0.1};
  CHECK(stationary_price_density(0.0, n) == doctest::Approx(5.0));
  CHECK(stationary_price_density(0.2, n) == doctest::Approx(5.0 * std::exp(-2.0)));
  CHECK(stationary_price_density(0.0, n) > stationary_price_density(0.01, n));
  const double mass = integrate([&](double x) { return stationary_price_density(x, n); }, -3.0, 3.0, 60000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  // Over [-1, 1] the tails beyond 10 scale lengths are missing: 1 - e^{-10}.
  const double inner = integrate([&](double x) { return stationary_price_density(x, n); }, -1.0, 1.0, 20000);
  CHECK(inner == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-9));
  try {
    stationary_price_density(0.0, NoiseModel{0.0, 0.1});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDistribution);
  }
  // Variance and mean |x| of the density by quadrature.
  const double var = integrate([&](double x) { return x * x * stationary_price_density(x, n); }, -2.0, 2.0, 40000);
  CHECK(stationary_price_variance(n) == doctest::Approx(var).epsilon(1e-8));
  CHECK(stationary_price_variance(n) == doctest::Approx(0.02));
  const double mad = integrate([&](double x) { return std::abs(x) * stationary_price_density(x, n); }, -2.0, 2.0, 40000);
  CHECK(stationary_price_scale(n) == doctest::Approx(mad).epsilon(1e-6));
}

TEST_CASE("Langevin variance reaches D^2 / (2 b^2)") {
  NoiseModel n{0.02, 0.1};
  Rng rng(42);
  std::vector<double> samples;
  // 200 independent chains, dt = 0.1, burn-in 300, then one sample every 5 time units.
  for (int c = 0; c < 200; ++c) {
    double x = 0.0;
    for (int k = 0; k < 3000; ++k) x = langevin_step(x, n, Regime::Stable, 0.1, rng);
    for (int s = 0; s < 500; ++s) {
      for (int k = 0; k < 50; ++k) x = langevin_step(x, n, Regime::Stable, 0.1, rng);
      samples.push_back(x);
    }
  }
  const auto m = sample_moments(samples);
  CHECK(m.variance == doctest::Approx(0.02).epsilon(0.05));
}

TEST_CASE("mean price law") {
  MarketParams p;
  p.epsilon = 0.02;
  p.alpha = 2.0;
  p.mu_nat = 1.0;
  MarketMeans m{1.0, 0.25, 1.0, 0.05};
  CHECK(mean_price_ode_step(1.0, p, m, 1.0) == 1.0);
  CHECK(mean_price_ode_step(1.4, p, MarketMeans{1.0, 0.25, 1.0, 0.0}, 1.0) == 1.4);
  const double dec = 1.4 - mean_price_ode_step(1.4, p, m, 1.0);
  CHECK(dec == doctest::Approx(2 * 0.02 * 1 * 0.25 * 1 * 2 * 0.05 * 0.4));
  // Negative reproduction pushes the price away from the natural price.
  CHECK(mean_price_ode_step(1.4, p, MarketMeans{1.0, -0.25, 1.0, 0.05}, 1.0) > 1.4);
  CHECK_THROWS_AS(mean_price_ode_step(1.4, p, MarketMeans{1.0, 0.25, 1.0, -1.0}, 1.0), Error);

  CHECK(decline_rate(m, p) == doctest::Approx(2 * 0.02 * 0.25 * 2 * 0.05));
  CHECK(decline_rate(m, p, 1.0) == doctest::Approx(0.02 * 0.25 * 2 * 0.05));
}

TEST_CASE("mean price closed form") {
  CHECK(mean_price_closed_form(0.0, 0.7, 0.3, 1.0) == doctest::Approx(1.7));
  CHECK(mean_price_closed_form(1e4, 0.7, 0.3, 1.0) == doctest::Approx(1.0));
  CHECK(mean_price_closed_form(10.0, 1.0, 0.1, 0.5) == doctest::Approx(0.5 + std::exp(-1.0)));
  CHECK(mean_price_closed_form(10.0, 1.0, 0.1, 0.5) == doctest::Approx(0.86788).epsilon(1e-5));
  CHECK_THROWS_AS(mean_price_closed_form(-1.0, 1.0, 0.1, 0.5), Error);
}

TEST_CASE("Euler mean price matches the closed form") {
  MarketParams p;
  p.epsilon = 0.02;
  p.alpha = 2.0;
  p.mu_nat = 0.5;
  MarketMeans m{1.0, 0.25, 1.0, 0.5};
  const double a = decline_rate(m, p);
  double mu = 1.5;
  const double dt = 1e-3;
  double worst = 0.0;
  for (int k = 1; k <= 50000; ++k) {
    mu = mean_price_ode_step(mu, p, m, dt);
    const double exact = mean_price_closed_form(k * dt, 1.0, a, 0.5);
    worst = std::max(worst, std::abs(mu - exact) / exact);
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("regime detection") {
  CHECK(detect_regime(1.2, 1.0).regime == Regime::Stable);
  CHECK(detect_regime(1.2, 1.0).mean_gamma == doctest::Approx(0.2));
  CHECK(detect_regime(1.0, 1.0).regime == Regime::Unstable);
  CHECK(detect_regime(0.8, 1.0).regime == Regime::Unstable);

  const auto d = demand(2.0, 1.0, 1.0);
  auto stable = two_brand_market(1.0, 1.3);  // d(1.3) = 0.82
  stable.mean_price = 1.3;
  const auto r = detect_regime(stable, d, 1.0);
  CHECK(r.regime == Regime::Stable);
  REQUIRE(r.fitness_slope.has_value());
  CHECK(*r.fitness_slope < 0.0);
  CHECK(r.slope_consistent);

  auto unstable = two_brand_market(0.5, 1.3);
  const auto u = detect_regime(unstable, d, 1.0);
  CHECK(u.regime == Regime::Unstable);
  CHECK(*u.fitness_slope >= 0.0);
  CHECK(u.slope_consistent);
}

TEST_CASE("minimal restoring jump solves the quadratic") {
  const auto d = demand(2.0, 1.0, 1.0);
  const double mu = 1.2;
  const double dm = demand_rate(mu, 0.0, d, 1.0);
  const double st = 0.99 * dm;
  const auto j = minimal_restoring_jump(mu, st, 0.0, d, 1.0);
  REQUIRE(j.has_value());
  // Bisection oracle on d(mu + J) - s_t over [0, upper edge].
  double lo = 0.0, hi = std::sqrt(0.5) + 1.0 - mu;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (demand_rate(mu + mid, 0.0, d, 1.0) > st ? lo : hi) = mid;
  }
  CHECK(*j == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
  CHECK(demand_rate(mu + *j, 0.0, d, 1.0) == doctest::Approx(st).epsilon(1e-12));

  CHECK(*minimal_restoring_jump(mu, 2.0, 0.0, d, 1.0) == 0.0);
  CHECK_FALSE(minimal_restoring_jump(mu, 0.0, 0.0, d, 1.0).has_value());
}

TEST_CASE("unstable jump returns the market to the stable regime") {
  const auto d = demand(2.0, 1.0, 1.0);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = 1.05 + 0.3 * rng.uniform();
    const double dm = demand_rate(mu, 0.0, d, 1.0);
    auto st = two_brand_market(dm * (0.5 + 0.5 * rng.uniform()), mu);
    const auto out = unstable_jump(mu, st, d, JumpConfig{0.05}, rng);
    REQUIRE(out.resolved);
    CHECK(out.jump > 0.0);
    CHECK(out.jump >= out.minimal_jump);
    CHECK(detect_regime(aggregate(st).total_supply, demand_rate(out.mean_price, 0.0, d, 1.0)).regime ==
          Regime::Stable);
  }
  auto stable = two_brand_market(1.0, 1.2);
  try {
    unstable_jump(1.2, stable, d, JumpConfig{}, rng);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolated);
  }
  // No supply at all: no jump can restore excess supply.
  auto empty = two_brand_market(0.0, 1.2);
  CHECK_FALSE(unstable_jump(1.2, empty, d, JumpConfig{}, rng).resolved);
}

TEST_CASE("ensemble price variance ignores shares and extinct brands") {
  std::vector<BrandState> bs(3);
  bs[0].sales_y = 0.9;
  bs[1].sales_y = 0.1;
  bs[2].sales_y = 1e-12;
  std::vector<double> dev = {0.1, -0.1, 5.0};
  bs[2].extinct = true;
  CHECK(ensemble_price_variance(bs, dev) == doctest::Approx(0.01));
  bs[2].extinct = false;
  // mean 5/3; squares (0.1-5/3)^2 + (-0.1-5/3)^2 + (5-5/3)^2 over 3.
  const double m = 5.0 / 3.0;
  CHECK(ensemble_price_variance(bs, dev) ==
        doctest::Approx(((0.1 - m) * (0.1 - m) + (0.1 + m) * (0.1 + m) + (5 - m) * (5 - m)) / 3.0));
  bs[1].extinct = bs[2].extinct = true;
  CHECK(ensemble_price_variance(bs, dev) == 0.0);
}

TEST_CASE("weighted price variance") {
  std::vector<BrandState> bs(2);
  bs[0].sales_y = 0.5;
  bs[1].sales_y = 0.5;
  std::vector<double> dev = {0.1, -0.1};
  CHECK(weighted_price_variance(bs, dev) == doctest::Approx(0.01));
  bs[0].sales_y = 1.0;
  bs[1].sales_y = 3.0;
  dev = {0.2, 0.0};
  CHECK(weighted_price_variance(bs, dev) == doctest::Approx(0.25 * 0.75 * 0.04));
}
