#pragma once

namespace exitwise {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Standard normal density.
double gauss_pdf(double x) noexcept;
/// Standard normal distribution function, accurate in both tails.
double gauss_cdf(double x) noexcept;
/// Upper tail 1 - gauss_cdf(x) without cancellation.
double gauss_sf(double x) noexcept;

double erf(double x) noexcept;
double erfc(double x) noexcept;

/// theta_2(0, q) = 2 sum_{n>=0} q^{(n+1/2)^2}, with q = exp(log_q), log_q < 0.
double theta2_zero(double log_q) noexcept;
/// theta_3(0, q) - 1 = 2 sum_{n>=1} q^{n^2}, with q = exp(log_q), log_q < 0.
double theta3_zero_minus_one(double log_q) noexcept;

/// Which expansion of the killed transition density is in use.
enum class SeriesKind { FirstKind, SecondKind };

struct ThetaBoundInputs {
  double t;
  SeriesKind kind;
};

/// Envelope constant for the Gaussian proposal (small-time expansion). Uniform in x.
double envelope_first_kind(double t);
/// Envelope constant for the sine proposal (large-time expansion) at start x in [-1, 1].
double envelope_second_kind(double t, double x);

/// Bound on E[terms] * P_x(tau > t) for the small-time expansion on [-1, 1].
double efficiency_bound_u1(double t);
/// Bound on E[terms] * P_x(tau > t) for the large-time expansion on [-1, 1].
double efficiency_bound_u2(double t, double x);
/// Dispatch on in.kind. x is ignored for FirstKind.
double efficiency_bound(const ThetaBoundInputs& in, double x);

}  // namespace exitwise
