#include "polnlos/csv.hpp"

#include <cmath>
#include <cstdio>

namespace polnlos {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out += ',';
    out += header[k];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw DimensionError("csv row width differs from header");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_number(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  sweep.validate();
  std::vector<std::string> header = sweep.parameters;
  for (const auto& s : sweep.series) header.push_back("kappa_" + s);
  std::vector<std::size_t> ratios;
  for (std::size_t s = 0; s < sweep.series.size(); ++s) {
    if (sweep.baseline[s] != s) {
      ratios.push_back(s);
      header.push_back("ratio_" + sweep.series[s]);
    }
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < sweep.size(); ++r) {
    std::vector<double> row = sweep.points[r];
    row.insert(row.end(), sweep.kappa[r].begin(), sweep.kappa[r].end());
    for (std::size_t s : ratios) row.push_back(sweep.ratio(r, s));
    rows.push_back(std::move(row));
  }
  return csv_table(header, rows);
}

}  // namespace polnlos
