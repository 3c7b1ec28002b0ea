#include "evomarket/report_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "evomarket/error.hpp"

namespace evomarket {

namespace {

using ojson = nlohmann::ordered_json;

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson to_json(const FitReport& r) {
  ojson j;
  j["distribution"] = r.distribution;
  j["count"] = r.count;
  j["degenerate"] = r.degenerate;
  j["location"] = num(r.location);
  j["scale"] = num(r.scale);
  if (r.distribution == "lognormal") {
    j["elapsed_t"] = num(r.elapsed_t);
    j["drift_u"] = num(r.drift_u);
    j["volatility_omega"] = num(r.volatility_omega);
  }
  j["log_likelihood"] = num(r.log_likelihood);
  j["ks"] = {{"statistic", num(r.ks_statistic)},
             {"p_value", num(r.ks_p_value)},
             {"significance", num(r.significance)},
             {"pass", r.ks_pass}};
  j["moments"] = {{"mean", num(r.moments.mean)},
                  {"variance", num(r.moments.variance)},
                  {"skewness", num(r.moments.skewness)},
                  {"excess_kurtosis", num(r.moments.excess_kurtosis)}};
  if (r.tent) {
    j["tent"] = {{"left_slope", num(r.tent->left_slope)},
                 {"right_slope", num(r.tent->right_slope)},
                 {"left_r_squared", num(r.tent->left_r_squared)},
                 {"right_r_squared", num(r.tent->right_r_squared)},
                 {"is_tent", r.tent->is_tent}};
  }
  return j;
}

}  // namespace

std::string fit_report_json(const FitReport& report) { return to_json(report).dump(2) + "\n"; }

std::string ensemble_report_json(const EnsembleReport& r) {
  ojson j;
  j["replicates"] = r.replicates;
  j["base_seed"] = r.base_seed;
  j["elapsed_tau"] = num(r.elapsed_tau);
  j["size_samples"] = r.size_samples;
  j["growth_samples"] = r.growth_samples;
  j["lognormal"] = r.lognormal ? to_json(*r.lognormal) : ojson{{"error", r.lognormal_error}};
  j["laplace"] = r.laplace ? to_json(*r.laplace) : ojson{{"error", r.laplace_error}};
  ojson failures = ojson::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"index", f.index}, {"seed", f.seed}, {"message", f.message}});
  }
  j["failed_replicates"] = failures;
  j["passed"] = r.passed();
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out << text;
  require(out.good(), ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace evomarket
