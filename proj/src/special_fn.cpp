#include "exitwise/special_fn.hpp"

#include <cassert>
#include <cmath>

#include "exitwise/errors.hpp"

namespace exitwise {

namespace {

constexpr double kThetaTermFloor = 1e-16;
constexpr int kThetaMaxTerms = 200;

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument(std::string(what) + ": t must be positive and finite");
}

}  // namespace

double gauss_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gauss_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double gauss_sf(double x) noexcept { return 0.5 * std::erfc(x / kSqrt2); }

// libm erf/erfc are correctly rounded to within a few ulp on every platform we target.
double erf(double x) noexcept { return std::erf(x); }

double erfc(double x) noexcept { return std::erfc(x); }

double theta2_zero(double log_q) noexcept {
  assert(log_q < 0.0);
  double sum = 0.0;
  int n = 0;
  for (; n < kThetaMaxTerms; ++n) {
    const double h = n + 0.5;
    const double term = 2.0 * std::exp(log_q * h * h);
    sum += term;
    const double hn = h + 1.0;
    if (2.0 * std::exp(log_q * hn * hn) < kThetaTermFloor) break;
  }
  assert(n == kThetaMaxTerms || 2.0 * std::exp(log_q * (n + 1.5) * (n + 1.5)) < 1e-15);
  return sum;
}

double theta3_zero_minus_one(double log_q) noexcept {
  assert(log_q < 0.0);
  double sum = 0.0;
  int n = 1;
  for (; n <= kThetaMaxTerms; ++n) {
    sum += 2.0 * std::exp(log_q * double(n) * n);
    const double nn = n + 1.0;
    if (2.0 * std::exp(log_q * nn * nn) < kThetaTermFloor) break;
  }
  assert(n > kThetaMaxTerms || 2.0 * std::exp(log_q * (n + 1.0) * (n + 1.0)) < 1e-15);
  return sum;
}

double envelope_first_kind(double t) {
  require_positive_time(t, "envelope_first_kind");
  return 3.0 + std::floor(std::sqrt(t) / 4.0);
}

double envelope_second_kind(double t, double x) {
  require_positive_time(t, "envelope_second_kind");
  const double pi2t8 = kPi * kPi * t / 8.0;
  const double n0 = std::floor(2.0 * kSqrt2 / (kPi * std::sqrt(t))) + 1.0;
  const double tail = 8.0 * n0 / (kPi * kPi * t) * std::exp(-n0 * n0 * pi2t8);
  const double head = n0 * n0 * n0 * std::exp(-pi2t8);
  return 4.0 / kPi * std::sin(0.5 * kPi * (x + 1.0)) * (tail + head);
}

double efficiency_bound_u1(double t) {
  require_positive_time(t, "efficiency_bound_u1");
  const double st = std::sqrt(t);
  return 3.0 + std::floor(st / 4.0) + st / (2.0 * std::sqrt(2.0 * kPi)) * theta2_zero(-8.0 / t);
}

double efficiency_bound_u2(double t, double x) {
  require_positive_time(t, "efficiency_bound_u2");
  return envelope_second_kind(t, x) + 8.0 / (kPi * kPi * t) * theta3_zero_minus_one(-kPi * kPi * t / 8.0);
}

double efficiency_bound(const ThetaBoundInputs& in, double x) {
  return in.kind == SeriesKind::FirstKind ? efficiency_bound_u1(in.t) : efficiency_bound_u2(in.t, x);
}

}  // namespace exitwise
