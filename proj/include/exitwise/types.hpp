#pragma once

#include <cstddef>

namespace exitwise {

/// Closed spatial domain [a, b] with a < b.
class Interval {
 public:
  Interval(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double width() const noexcept { return b_ - a_; }
  double midpoint() const noexcept { return 0.5 * (a_ + b_); }
  bool contains_strictly(double x) const noexcept { return a_ < x && x < b_; }

  /// Affine map onto [-1, 1].
  double to_unit(double x) const noexcept { return (2.0 * x - a_ - b_) / (b_ - a_); }
  double from_unit(double y) const noexcept { return 0.5 * (b_ - a_) * y + midpoint(); }
  /// Time change matching to_unit: t' = 4t / (b - a)^2.
  double time_to_unit(double t) const noexcept { return 4.0 * t / ((b_ - a_) * (b_ - a_)); }

 private:
  double a_;
  double b_;
};

/// Lower end of the admissible window for SeriesParams::t_e.
inline constexpr double kExitThresholdMin = 4.0 / (9.0 * 9.869604401089358);
inline constexpr double kExitThresholdMax = 1.0;

/// Tuning shared by the series samplers.
struct SeriesParams {
  double t_c = 0.7;  ///< first/second series crossover in the unit-interval clock
  double t_e = 0.5;  ///< small/large branch threshold of the exit-time proposal
  std::size_t max_terms = 10'000;

  /// Throws InvalidArgument when any field is outside its admissible range.
  void validate() const;
};

}  // namespace exitwise
