#include "evomarket/timeseries_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "evomarket/error.hpp"

namespace evomarket {

namespace {

constexpr std::size_t kFixedColumns = 8;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& what) {
  fail(ErrorKind::ScenarioFormat, "time series line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> timeseries_header(std::size_t brand_count) {
  std::vector<std::string> cols = {"t",          "tau",    "mean_price", "mean_fitness",
                                   "mean_gamma", "regime", "y_t",        "s_t"};
  for (std::size_t i = 0; i < brand_count; ++i) {
    const std::string k = std::to_string(i);
    cols.push_back("y_" + k);
    cols.push_back("mu_" + k);
    cols.push_back("f_" + k);
  }
  return cols;
}

void write_timeseries(std::ostream& out, const Trajectory& traj) {
  out << "# " << kTimeSeriesVersion << '\n';
  const auto header = timeseries_header(traj.brand_count());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& s : traj.snapshots()) {
    out << format_number(s.t) << ',' << format_number(s.tau) << ',' << format_number(s.mean_price)
        << ',' << format_number(s.mean_fitness) << ',' << format_number(s.mean_gamma) << ','
        << to_string(s.regime) << ',' << format_number(s.total_sales) << ','
        << format_number(s.total_supply);
    for (const auto& b : s.brands) {
      out << ',' << format_number(b.sales_y) << ',' << format_number(b.price_mu) << ','
          << format_number(b.fitness_f);
    }
    out << '\n';
  }
}

std::string timeseries_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_timeseries(out, traj);
  return out.str();
}

void save_timeseries(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  write_timeseries(out, traj);
  require(out.good(), ErrorKind::Io, "write failed for " + path.string());
}

std::vector<double> TimeSeriesTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  fail(ErrorKind::InvalidParameter, "no column named '" + std::string(name) + "'");
}

TimeSeriesTable read_timeseries(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "# " + std::string(kTimeSeriesVersion),
          ErrorKind::ScenarioFormat,
          "time series line 1: expected version line '# " + std::string(kTimeSeriesVersion) + "'");
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::ScenarioFormat,
          "time series line 2: missing header");
  TimeSeriesTable table;
  table.columns = split(line);
  const std::size_t ncol = table.columns.size();
  if (ncol < kFixedColumns || (ncol - kFixedColumns) % 3 != 0 ||
      table.columns != timeseries_header((ncol - kFixedColumns) / 3)) {
    bad_row(2, "header does not match the 8 + 3N column layout");
  }
  table.brand_count = (ncol - kFixedColumns) / 3;

  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != ncol) {
      bad_row(lineno, "expected " + std::to_string(ncol) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row(ncol);
    for (std::size_t c = 0; c < ncol; ++c) {
      const auto& f = fields[c];
      if (c == 5) {
        if (f == "Stable") row[c] = 1.0;
        else if (f == "Unstable") row[c] = 0.0;
        else bad_row(lineno, "regime must be Stable or Unstable");
        continue;
      }
      const auto res = std::from_chars(f.data(), f.data() + f.size(), row[c]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        bad_row(lineno, "column '" + table.columns[c] + "' is not a number: '" + f + "'");
      }
    }
    if (!table.rows.empty() && !(row[0] > table.rows.back()[0])) {
      bad_row(lineno, "t must be strictly increasing");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TimeSeriesTable load_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot open " + path.string());
  try {
    return read_timeseries(in);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

Trajectory trajectory_from_table(const TimeSeriesTable& table) {
  Trajectory traj;
  for (const auto& row : table.rows) {
    Snapshot s;
    s.t = row[0];
    s.tau = row[1];
    s.mean_price = row[2];
    s.mean_fitness = row[3];
    s.mean_gamma = row[4];
    s.regime = row[5] > 0.5 ? Regime::Stable : Regime::Unstable;
    s.total_sales = row[6];
    s.total_supply = row[7];
    s.reference_price = s.mean_price;
    for (std::size_t i = 0; i < table.brand_count; ++i) {
      BrandSample b;
      b.sales_y = row[kFixedColumns + 3 * i];
      b.price_mu = row[kFixedColumns + 3 * i + 1];
      b.fitness_f = row[kFixedColumns + 3 * i + 2];
      b.price_deviation = b.price_mu - s.mean_price;
      b.growth_r = b.fitness_f - s.mean_fitness;
      s.brands.push_back(b);
    }
    traj.append(std::move(s));
  }
  return traj;
}

}  // namespace evomarket
