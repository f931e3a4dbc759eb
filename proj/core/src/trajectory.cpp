#include "frw/trajectory.hpp"

#include <cmath>

#include "frw/errors.hpp"

namespace frw {

double Trajectory::max_abs_diagnostic(const std::string& name) const {
  const auto index = diagnostic_index(name);
  if (!index) throw PreconditionError("trajectory has no diagnostic named '" + name + "'");
  double worst = 0.0;
  for (const auto& row : samples) {
    const double v = std::abs(row.diagnostics.at(*index));
    if (std::isnan(v) || v > worst) worst = v;
    if (std::isnan(worst)) return worst;
  }
  return worst;
}

}  // namespace frw
