#pragma once

#include "polnlos/conditioning.hpp"

#include <string>
#include <vector>

namespace polnlos {

/// Decimal with 17 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double value);

/// Header line plus one line per row, comma separated, '\n' terminated.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// Parameter columns, then kappa_<series>, then ratio_<series> for every
/// series that is not its own baseline.
std::string sweep_csv(const SweepResult& sweep);

}  // namespace polnlos
