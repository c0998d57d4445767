#include "exitwise/types.hpp"

#include <cmath>
#include <string>

#include "exitwise/errors.hpp"

namespace exitwise {

Interval::Interval(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw InvalidArgument("interval requires finite a < b, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
}

void SeriesParams::validate() const {
  if (!(t_c > 0.0) || !std::isfinite(t_c)) throw InvalidArgument("t_c must be positive");
  // small slack so the literal window ends 4/(9 pi^2) and 1 are accepted
  if (!(t_e >= kExitThresholdMin * (1.0 - 1e-12) && t_e <= kExitThresholdMax))
    throw InvalidArgument("t_e must lie in [4/(9 pi^2), 1], got " + std::to_string(t_e));
  if (max_terms < 16) throw InvalidArgument("max_terms must be at least 16");
}

}  // namespace exitwise
