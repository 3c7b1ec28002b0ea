#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "evomarket/error.hpp"
#include "evomarket/report_io.hpp"
#include "evomarket/rng.hpp"
#include "evomarket/scenario_io.hpp"
#include "evomarket/simulation.hpp"
#include "evomarket/timeseries_io.hpp"

using namespace evomarket;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "evomarket_cli_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + EVOMARKET_CLI + "\" " + args + " > \"" +
                          scratch("cli_stdout.txt").string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(raw);
#else
  return raw;
#endif
}

const std::string kScenarios = EVOMARKET_SCENARIOS;

Scenario random_scenario(Rng& rng) {
  Scenario sc = default_scenario();
  sc.params.epsilon = 0.01 + 0.05 * rng.uniform();
  sc.params.noise_D = 0.1 * rng.uniform();
  sc.params.rng_seed = static_cast<std::uint64_t>(rng.uniform() * 1e12);
  const int n = 2 + static_cast<int>(rng.uniform() * 5);
  sc.brands.clear();
  for (int i = 0; i < n; ++i) {
    sc.brands.push_back(BrandInit{0.1 + rng.uniform(), 0.8 + 0.4 * rng.uniform(), rng.uniform() + 0.1,
                                  0.3 * rng.uniform(), rng.uniform()});
  }
  sc.demand.bass_p = 0.1 * rng.uniform();
  sc.adopter_fraction = 0.5 + 0.5 * rng.uniform();
  if (rng.uniform() < 0.5) sc.supply_shocks.push_back(SupplyShock{3.0, -0.05, 1});
  if (rng.uniform() < 0.5) sc.supply_shocks.push_back(SupplyShock{1.0 / 3.0, 0.01, std::nullopt});
  if (rng.uniform() < 0.5) sc.demand_shocks.push_back(DemandShock{2.5, 1.1});
  sc.run.dt_tau = 0.1 + rng.uniform();
  sc.run.long_steps = 1 + static_cast<std::size_t>(rng.uniform() * 500);
  sc.run.fitness_shock = FitnessShock{rng.uniform() < 0.5 ? ShockDistribution::Normal : ShockDistribution::Uniform,
                                      0.01 * rng.uniform()};
  sc.run.variance_mode = rng.uniform() < 0.5 ? VarianceMode::Live : VarianceMode::Frozen;
  const double pick = rng.uniform();
  sc.run.langevin_scheme = pick < 0.33 ? LangevinScheme::Exact
                           : pick < 0.67 ? LangevinScheme::Splitting
                                         : LangevinScheme::EulerMaruyama;
  sc.run.evolve_adopters = rng.uniform() < 0.5;
  sc.outputs.timeseries = "ts_" + std::to_string(n) + ".csv";
  return sc;
}

}  // namespace

TEST_CASE("scenario round trip") {
  Rng rng(31);
  for (int k = 0; k < 100; ++k) {
    const Scenario sc = random_scenario(rng);
    const std::string text = serialize_scenario(sc);
    const Scenario back = parse_scenario(text);
    CHECK(back == sc);
    CHECK(serialize_scenario(back) == text);
  }
}

TEST_CASE("shipped scenario files parse and validate") {
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const Scenario sc = load_scenario(entry.path());
    CHECK_NOTHROW(validate(sc));
  }
  CHECK(load_scenario(fs::path(kScenarios) / "default.json") == [] {
    Scenario s = default_scenario();
    s.params.market_potential = 1e6;
    s.run.ensemble_size = 8;
    return s;
  }());
}

TEST_CASE("scenario errors name the location") {
  const std::string good = serialize_scenario(default_scenario());

  auto message = [](const std::string& text) -> std::string {
    try {
      parse_scenario(text);
    } catch (const Error& e) {
      return e.what();
    }
    return "";
  };

  // Syntax error: line and column.
  const std::string broken = "{\n  \"brands\": [\n    { \"sales_y\": 0.5, }\n  ]\n}";
  const auto syntax = message(broken);
  CHECK(syntax.find("line 3") != std::string::npos);
  CHECK(syntax.find("column") != std::string::npos);

  auto j = nlohmann::json::parse(good);
  j["run"]["dt_tua"] = 1.0;
  CHECK(message(j.dump()).find("$.run.dt_tua") != std::string::npos);

  j = nlohmann::json::parse(good);
  j["params"]["alpha"] = "two";
  CHECK(message(j.dump()).find("$.params.alpha") != std::string::npos);

  j = nlohmann::json::parse(good);
  j["brands"].erase(1);
  try {
    parse_scenario(j.dump());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Monopoly);
    CHECK(std::string(e.what()).find("$.brands") != std::string::npos);
  }

  j = nlohmann::json::parse(good);
  j["run"]["variance_mode"] = "thawed";
  CHECK(message(j.dump()).find("$.run.variance_mode") != std::string::npos);

  j = nlohmann::json::parse(good);
  j["params"]["epsilon"] = -1.0;
  try {
    parse_scenario(j.dump());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("time series layout and round trip") {
  Scenario sc = default_scenario();
  sc.run.short_steps_per_long = 10;
  const auto res = run_simulation(sc);
  const std::string csv = timeseries_csv(res.trajectory);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# evomarket.timeseries/1");
  std::getline(in, line);
  CHECK(line == "t,tau,mean_price,mean_fitness,mean_gamma,regime,y_t,s_t,y_0,mu_0,f_0,y_1,mu_1,f_1");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 13);
  }
  CHECK(rows == 101);

  std::istringstream again(csv);
  const auto table = read_timeseries(again);
  CHECK(table.rows.size() == 101);
  CHECK(table.brand_count == 2);
  const auto& snaps = res.trajectory.snapshots();
  const auto mp = table.column("mean_price");
  for (std::size_t k = 0; k < snaps.size(); ++k) CHECK(mp[k] == snaps[k].mean_price);
  CHECK(table.column("regime").front() == 1.0);
  CHECK_THROWS_AS(table.column("nope"), Error);

  const auto traj = trajectory_from_table(table);
  CHECK(timeseries_csv(traj) == csv);
}

TEST_CASE("time series reader rejects malformed input") {
  auto kind_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_timeseries(in);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string head = "# evomarket.timeseries/1\nt,tau,mean_price,mean_fitness,mean_gamma,regime,y_t,s_t\n";
  CHECK(kind_of("t,tau\n").find("line 1") != std::string::npos);
  CHECK(kind_of(head + "0,0,1,0,0,Stable,1\n").find("line 3") != std::string::npos);
  CHECK(kind_of(head + "0,0,x,0,0,Stable,1,1\n").find("line 3") != std::string::npos);
  CHECK(kind_of(head + "1,0,1,0,0,Stable,1,1\n0,0,1,0,0,Stable,1,1\n").find("line 4") != std::string::npos);
}

TEST_CASE("same seed gives byte-identical files") {
  Scenario sc = default_scenario();
  sc.run.short_steps_per_long = 10;
  const auto a = timeseries_csv(run_simulation(sc).trajectory);
  const auto b = timeseries_csv(run_simulation(sc).trajectory);
  CHECK(a == b);
}

TEST_CASE("number formatting round-trips") {
  Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, 20.0 * (rng.uniform() - 0.5));
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(100.0) == "100");
}

TEST_CASE("reports are valid JSON") {
  FitReport r;
  r.distribution = "laplace";
  r.scale = std::numeric_limits<double>::infinity();
  const auto j = nlohmann::json::parse(fit_report_json(r));
  CHECK(j["distribution"] == "laplace");
  CHECK(j["scale"].is_null());
}

TEST_CASE("command line exit codes") {
  const std::string def = "\"" + kScenarios + "/default.json\"";
  const std::string out = "\"" + scratch("out").string() + "\"";

  CHECK(run_cli("validate -s " + def) == 0);
  CHECK(run_cli("simulate -s " + def + " -o " + out + " --steps 5") == 0);
  const auto csv = scratch("out") / "timeseries.csv";
  REQUIRE(fs::exists(csv));
  CHECK(run_cli("fit --series \"" + csv.string() + "\" --quantity deviation --distribution normal") == 0);
  CHECK(run_cli("plot --kind price_path --series \"" + csv.string() + "\"") == 0);

  // Bad input: missing file, unknown verb, unknown plot kind, malformed scenario.
  CHECK(run_cli("simulate -s /nonexistent/x.json") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("plot --kind pie --series \"" + csv.string() + "\"") == 1);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{ \"brands\": [ }";
  CHECK(run_cli("validate -s \"" + bad.string() + "\"") == 1);
  CHECK(slurp(scratch("cli_stdout.txt")).find("line 1") != std::string::npos);

  // Runtime failure: too few rows for a Laplace fit.
  CHECK(run_cli("fit --series \"" + csv.string() + "\" --quantity column --column mean_price") == 2);
}
