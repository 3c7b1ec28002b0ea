#include "evomarket/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "evomarket/error.hpp"

namespace evomarket {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;  // keeps the documented key order on output

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::ScenarioFormat, path + ": " + what);
}

// Object reader that tracks its JSON path and rejects unexpected keys.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) bad(path_, "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known) bad(path_ + "." + key, "unknown key");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }
  std::string at(const char* key) const { return path_ + "." + key; }
  const json& raw(const char* key) const { return node_.at(key); }

  void number(const char* key, double& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number()) bad(at(key), "expected a number");
    out = v.get<double>();
  }

  void count(const char* key, std::size_t& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      bad(at(key), "expected a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  void seed(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      bad(at(key), "expected a non-negative 64-bit integer");
    }
    out = v.get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) bad(at(key), "expected true or false");
    out = v.get<bool>();
  }

  void text(const char* key, std::string& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_string()) bad(at(key), "expected a string");
    out = v.get<std::string>();
  }

  template <typename Enum>
  void choice(const char* key, Enum& out,
              std::initializer_list<std::pair<std::string_view, Enum>> options) const {
    if (!has(key)) return;
    std::string s;
    text(key, s);
    std::string valid;
    for (const auto& [name, value] : options) {
      if (s == name) {
        out = value;
        return;
      }
      valid += valid.empty() ? std::string(name) : ", " + std::string(name);
    }
    bad(at(key), "unknown value '" + s + "' (expected one of: " + valid + ")");
  }

 private:
  const json& node_;
  std::string path_;
};

const json& array_at(const Section& s, const char* key) {
  const json& v = s.raw(key);
  if (!v.is_array()) bad(s.at(key), "expected an array");
  return v;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string_view distribution_name(ShockDistribution d) {
  return d == ShockDistribution::Normal ? "normal" : "uniform";
}

std::string_view scheme_name(LangevinScheme s) {
  switch (s) {
    case LangevinScheme::Exact: return "exact";
    case LangevinScheme::Splitting: return "splitting";
    case LangevinScheme::EulerMaruyama: return "euler_maruyama";
  }
  return "exact";
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, byte);
    std::ostringstream msg;
    msg << "line " << line << ", column " << col << ": malformed JSON";
    fail(ErrorKind::ScenarioFormat, msg.str());
  }

  Scenario sc;
  Section root(doc, "$");
  root.allow_only({"schema", "params", "brands", "demand", "shocks", "run", "outputs"});
  if (root.has("schema")) {
    std::string schema;
    root.text("schema", schema);
    if (schema != kScenarioSchema) {
      bad("$.schema", "unsupported schema '" + schema + "' (expected " + std::string(kScenarioSchema) + ")");
    }
  }

  if (root.has("params")) {
    Section p(root.raw("params"), "$.params");
    p.allow_only({"market_potential_M", "mean_amount_m", "alpha", "d_max", "mu_nat", "epsilon",
                  "psi0", "noise_D", "response_b"});
    p.number("market_potential_M", sc.params.market_potential);
    p.number("mean_amount_m", sc.params.mean_amount);
    p.number("alpha", sc.params.alpha);
    p.number("d_max", sc.params.d_max);
    p.number("mu_nat", sc.params.mu_nat);
    p.number("epsilon", sc.params.epsilon);
    p.number("psi0", sc.params.psi0);
    p.number("noise_D", sc.params.noise_D);
    p.number("response_b", sc.params.response_b);
  }

  if (!root.has("brands")) bad("$.brands", "missing (a market needs at least two brands)");
  const json& brands = array_at(root, "brands");
  for (std::size_t i = 0; i < brands.size(); ++i) {
    Section b(brands[i], "$.brands[" + std::to_string(i) + "]");
    b.allow_only({"sales_y", "price_mu", "preference_eta", "reproduction_gamma", "inventory_x"});
    BrandInit init;
    b.number("sales_y", init.sales_y);
    b.number("price_mu", init.price_mu);
    b.number("preference_eta", init.preference_eta);
    b.number("reproduction_gamma", init.reproduction_gamma);
    b.number("inventory_x", init.inventory_x);
    sc.brands.push_back(init);
  }
  require(sc.brands.size() >= 2, ErrorKind::Monopoly,
          "$.brands: at least two brands are required (monopoly markets are excluded)");

  if (root.has("demand")) {
    Section d(root.raw("demand"), "$.demand");
    d.allow_only({"adopter_fraction", "bass_p", "bass_q", "seasonal_amplitude", "seasonal_period"});
    d.number("adopter_fraction", sc.adopter_fraction);
    d.number("bass_p", sc.demand.bass_p);
    d.number("bass_q", sc.demand.bass_q);
    d.number("seasonal_amplitude", sc.demand.seasonal_amplitude);
    d.number("seasonal_period", sc.demand.seasonal_period);
  }
  sc.demand.alpha = sc.params.alpha;
  sc.demand.d_max = sc.params.d_max;
  sc.demand.mu_nat = sc.params.mu_nat;

  if (root.has("shocks")) {
    Section s(root.raw("shocks"), "$.shocks");
    s.allow_only({"supply", "demand"});
    if (s.has("supply")) {
      const json& list = array_at(s, "supply");
      for (std::size_t i = 0; i < list.size(); ++i) {
        Section e(list[i], "$.shocks.supply[" + std::to_string(i) + "]");
        e.allow_only({"time", "gamma_delta", "brand"});
        SupplyShock shock;
        e.number("time", shock.time);
        e.number("gamma_delta", shock.gamma_delta);
        if (e.has("brand")) {
          std::size_t brand = 0;
          e.count("brand", brand);
          shock.brand = brand;
        }
        sc.supply_shocks.push_back(shock);
      }
    }
    if (s.has("demand")) {
      const json& list = array_at(s, "demand");
      for (std::size_t i = 0; i < list.size(); ++i) {
        Section e(list[i], "$.shocks.demand[" + std::to_string(i) + "]");
        e.allow_only({"time", "d_max_factor"});
        DemandShock shock;
        e.number("time", shock.time);
        e.number("d_max_factor", shock.d_max_factor);
        sc.demand_shocks.push_back(shock);
      }
    }
  }

  if (root.has("run")) {
    Section r(root.raw("run"), "$.run");
    r.allow_only({"seed", "dt_tau", "dt_long", "long_steps", "snapshot_stride",
                  "short_steps_per_long", "fitness_shock", "variance_mode", "frozen_variance",
                  "jump_mean", "langevin_scheme", "evolve_adopters", "ensemble_size"});
    auto& run = sc.run;
    r.seed("seed", sc.params.rng_seed);
    r.number("dt_tau", run.dt_tau);
    r.number("dt_long", run.dt_long);
    r.count("long_steps", run.long_steps);
    r.count("snapshot_stride", run.snapshot_stride);
    r.count("short_steps_per_long", run.short_steps_per_long);
    if (r.has("fitness_shock")) {
      Section f(r.raw("fitness_shock"), "$.run.fitness_shock");
      f.allow_only({"distribution", "sd"});
      f.choice("distribution", run.fitness_shock.distribution,
               {{"normal", ShockDistribution::Normal}, {"uniform", ShockDistribution::Uniform}});
      f.number("sd", run.fitness_shock.sd);
    }
    r.choice("variance_mode", run.variance_mode,
             {{"live", VarianceMode::Live}, {"frozen", VarianceMode::Frozen}});
    r.number("frozen_variance", run.frozen_variance);
    r.number("jump_mean", run.jump_mean);
    r.choice("langevin_scheme", run.langevin_scheme,
             {{"exact", LangevinScheme::Exact},
              {"splitting", LangevinScheme::Splitting},
              {"euler_maruyama", LangevinScheme::EulerMaruyama}});
    r.boolean("evolve_adopters", run.evolve_adopters);
    r.count("ensemble_size", run.ensemble_size);
  }

  if (root.has("outputs")) {
    Section o(root.raw("outputs"), "$.outputs");
    o.allow_only({"timeseries", "report"});
    o.text("timeseries", sc.outputs.timeseries);
    o.text("report", sc.outputs.report);
  }

  try {
    validate(sc);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ScenarioFormat) throw;
    fail(e.kind(), std::string("scenario: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize_scenario(const Scenario& sc) {
  ojson doc = ojson::object();
  doc["schema"] = kScenarioSchema;
  const auto& p = sc.params;
  doc["params"] = {
      {"market_potential_M", p.market_potential},
      {"mean_amount_m", p.mean_amount},
      {"alpha", p.alpha},
      {"d_max", p.d_max},
      {"mu_nat", p.mu_nat},
      {"epsilon", p.epsilon},
      {"psi0", p.psi0},
      {"noise_D", p.noise_D},
      {"response_b", p.response_b},
  };
  ojson brands = ojson::array();
  for (const auto& b : sc.brands) {
    brands.push_back({{"sales_y", b.sales_y},
                      {"price_mu", b.price_mu},
                      {"preference_eta", b.preference_eta},
                      {"reproduction_gamma", b.reproduction_gamma},
                      {"inventory_x", b.inventory_x}});
  }
  doc["brands"] = brands;
  doc["demand"] = {
      {"adopter_fraction", sc.adopter_fraction},
      {"bass_p", sc.demand.bass_p},
      {"bass_q", sc.demand.bass_q},
      {"seasonal_amplitude", sc.demand.seasonal_amplitude},
      {"seasonal_period", sc.demand.seasonal_period},
  };
  ojson supply = ojson::array();
  for (const auto& s : sc.supply_shocks) {
    ojson e = {{"time", s.time}, {"gamma_delta", s.gamma_delta}};
    if (s.brand) e["brand"] = *s.brand;
    supply.push_back(e);
  }
  ojson demand = ojson::array();
  for (const auto& s : sc.demand_shocks) {
    demand.push_back({{"time", s.time}, {"d_max_factor", s.d_max_factor}});
  }
  doc["shocks"] = {{"supply", supply}, {"demand", demand}};
  const auto& r = sc.run;
  doc["run"] = {
      {"seed", p.rng_seed},
      {"dt_tau", r.dt_tau},
      {"dt_long", r.dt_long},
      {"long_steps", r.long_steps},
      {"snapshot_stride", r.snapshot_stride},
      {"short_steps_per_long", r.short_steps_per_long},
      {"fitness_shock",
       {{"distribution", distribution_name(r.fitness_shock.distribution)}, {"sd", r.fitness_shock.sd}}},
      {"variance_mode", r.variance_mode == VarianceMode::Live ? "live" : "frozen"},
      {"frozen_variance", r.frozen_variance},
      {"jump_mean", r.jump_mean},
      {"langevin_scheme", scheme_name(r.langevin_scheme)},
      {"evolve_adopters", r.evolve_adopters},
      {"ensemble_size", r.ensemble_size},
  };
  doc["outputs"] = {{"timeseries", sc.outputs.timeseries}, {"report", sc.outputs.report}};
  return doc.dump(2) + "\n";
}

}  // namespace evomarket
