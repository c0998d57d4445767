#include "exitwise/conditional_position.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exitwise/errors.hpp"

namespace exitwise {

namespace {

constexpr double kBoundaryGap = 1e-9;
constexpr double kSeriesFloor = 1e-14;

inline double phi_scaled(double z, double inv_st) noexcept { return inv_st * gauss_pdf(z * inv_st); }

// a_n for any integer n: direct image shifted by 4n minus its reflection.
inline double image_pair(int n, double inv_st, double x, double y) noexcept {
  return phi_scaled(x - y - 4.0 * n, inv_st) - phi_scaled(x + y - 2.0 - 4.0 * n, inv_st);
}

inline double first_term(int n, double inv_st, double x, double y) noexcept {
  if (n == 0) return image_pair(0, inv_st, x, y);
  return image_pair(n, inv_st, x, y) + image_pair(-n, inv_st, x, y);
}

inline double second_term(int n, double t, double x, double y) noexcept {
  const double h = 0.5 * kPi * n;
  return std::exp(-double(n) * n * kPi * kPi * t / 8.0) * std::sin(h * (x + 1.0)) * std::sin(h * (y + 1.0));
}

// Bound on sum_{k>=0} phi((c + 4k)/sqrt t)/sqrt t for c >= 0: first term plus integral of the rest.
inline double image_tail(double c, double t) noexcept {
  const double z = c / std::sqrt(t);
  return gauss_pdf(z) / std::sqrt(t) + 0.25 * gauss_sf(z);
}

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be positive and finite, got " + std::to_string(t));
}

void require_interior_unit(double x) {
  if (!(std::abs(x - 1.0) > kBoundaryGap && std::abs(x + 1.0) > kBoundaryGap && x > -1.0 && x < 1.0))
    throw InvalidArgument("start must be interior with a gap above 1e-9 to each boundary (unit coordinates), got " +
                          std::to_string(x));
}

// Phi(z1) - 2 Phi(z2) + Phi(z3) evaluated on whichever tail avoids cancellation.
inline double second_difference(double z1, double z2, double z3) noexcept {
  if (z2 > 0.0) return -gauss_sf(z1) + 2.0 * gauss_sf(z2) - gauss_sf(z3);
  return gauss_cdf(z1) - 2.0 * gauss_cdf(z2) + gauss_cdf(z3);
}

double survival_images(double t, double x) {
  const double st = std::sqrt(t);
  auto bracket = [&](int n) {
    const double s = 4.0 * n;
    return second_difference((x + 1.0 - s) / st, (x - 1.0 - s) / st, (x - 3.0 - s) / st);
  };
  double sum = bracket(0);
  for (int n = 1; n < 100'000; ++n) {
    const double up = bracket(n);
    const double down = bracket(-n);
    sum += up + down;
    if (std::abs(up) < kSeriesFloor && std::abs(down) < kSeriesFloor) break;
  }
  return sum;
}

double survival_eigen(double t, double x) {
  double sum = 0.0;
  for (int n = 0; n < 100'000; ++n) {
    const double m = 2.0 * n + 1.0;
    const double w = std::exp(-m * m * kPi * kPi * t / 8.0) / m;
    sum += w * std::sin(m * (x + 1.0) * kPi / 2.0);
    if (w < kSeriesFloor) break;
  }
  return 4.0 / kPi * sum;
}

}  // namespace

double density_first_kind_term(int n, double t, double x, double y) {
  require_time(t);
  return first_term(n, 1.0 / std::sqrt(t), x, y);
}

double density_second_kind_term(int n, double t, double x, double y) {
  require_time(t);
  return second_term(n, t, x, y);
}

double remainder_first(int n, double t) {
  require_time(t);
  if (n < 1) throw InvalidArgument("remainder_first needs n >= 1");
  return 0.25 * erfc((4.0 * n - 2.0) / std::sqrt(2.0 * t));
}

double remainder_first_at(int n, double t, double x, double y) {
  if (n >= 1) return remainder_first(n, t);
  require_time(t);
  // positive images x-y-4k and negative images x+y-2+4k, k >= 1, bounded separately
  return std::max(image_tail(4.0 - (x - y), t), image_tail(x + y + 2.0, t));
}

double remainder_second(int n, double t) {
  require_time(t);
  if (n < 0) throw InvalidArgument("remainder_second needs n >= 0");
  return std::sqrt(2.0 / (kPi * t)) * erfc(n * kPi * std::sqrt(t) / (2.0 * kSqrt2));
}

DensityEval density(double t, double x, double y, SeriesKind kind, double tol, std::size_t max_terms) {
  require_time(t);
  double sum = 0.0;
  if (kind == SeriesKind::FirstKind) {
    const double inv_st = 1.0 / std::sqrt(t);
    for (std::size_t n = 0; n < max_terms; ++n) {
      sum += first_term(int(n), inv_st, x, y);
      const double r = remainder_first_at(int(n), t, x, y);
      if (r < tol) return {sum, n + 1, r};
    }
  } else {
    for (std::size_t n = 1; n <= max_terms; ++n) {
      sum += second_term(int(n), t, x, y);
      const double r = remainder_second(int(n), t);
      if (r < tol) return {sum, n, r};
    }
  }
  throw AbortMaxTerms("density: tolerance not reached within max_terms");
}

double envelope_kappa(double t, double x, SeriesKind kind) {
  return kind == SeriesKind::FirstKind ? envelope_first_kind(t) : envelope_second_kind(t, x);
}

double proposal_density(double t, double x, double y, SeriesKind kind) {
  require_time(t);
  if (kind == SeriesKind::FirstKind) return phi_scaled(x - y, 1.0 / std::sqrt(t));
  if (y < -1.0 || y > 1.0) return 0.0;
  return 0.25 * kPi * std::sin(0.5 * kPi * (y + 1.0));
}

double proposal_h(double t, double x, SeriesKind kind, RngStream& rng) {
  require_time(t);
  if (kind == SeriesKind::FirstKind) return x + std::sqrt(t) * rng.gaussian();
  return 2.0 / kPi * std::acos(1.0 - 2.0 * rng.uniform()) - 1.0;
}

double survival_probability_series(double t, double x, SeriesKind kind) {
  if (!(t >= 0.0)) throw InvalidArgument("survival_probability needs t >= 0");
  if (!(x >= -1.0 && x <= 1.0)) throw InvalidArgument("survival_probability needs x in [-1, 1]");
  if (x == -1.0 || x == 1.0) return 0.0;
  if (t == 0.0) return 1.0;
  const double p = kind == SeriesKind::FirstKind ? survival_images(t, x) : survival_eigen(t, x);
  return std::clamp(p, 0.0, 1.0);
}

double survival_probability(double t, double x, double t_c) {
  return survival_probability_series(t, x, t <= t_c ? SeriesKind::FirstKind : SeriesKind::SecondKind);
}

ConditionalSample sample_conditional_unit(double x, double t, SeriesKind kind, std::size_t max_terms, RngStream& rng) {
  require_interior_unit(x);
  if (t == 0.0) return {x, 0, 0};
  require_time(t);
  const double kappa = envelope_kappa(t, x, kind);
  const double inv_st = 1.0 / std::sqrt(t);
  ConditionalSample out{x, 0, 0};
  for (;;) {
    ++out.proposals;
    const double y = proposal_h(t, x, kind, rng);
    // the target vanishes off (-1, 1); such proposals are rejected before any term is computed
    if (!(y > -1.0 && y < 1.0)) continue;
    const double w = kappa * rng.uniform() * proposal_density(t, x, y, kind);
    double s = 0.0;
    bool decided = false;
    for (std::size_t j = 0; j < max_terms; ++j) {
      double r;
      if (kind == SeriesKind::FirstKind) {
        s += first_term(int(j), inv_st, x, y);
        r = remainder_first_at(int(j), t, x, y);
      } else {
        s += second_term(int(j) + 1, t, x, y);
        r = remainder_second(int(j) + 1, t);
      }
      ++out.n_c;
      if (std::abs(s - w) > r) {
        decided = true;
        break;
      }
    }
    if (!decided)
      throw AbortMaxTerms("conditional sampler: no decision after " + std::to_string(max_terms) +
                          " terms (x=" + std::to_string(x) + ", t=" + std::to_string(t) + ")");
    if (w <= s) {
      out.position = y;
      return out;
    }
  }
}

ConditionalSample sample_conditional(double x, const Interval& iv, double t, const SeriesParams& params, RngStream& rng) {
  params.validate();
  if (!iv.contains_strictly(x)) throw InvalidArgument("start must lie strictly inside the interval");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be nonnegative and finite");
  const double xu = iv.to_unit(x);
  require_interior_unit(xu);
  if (t == 0.0) return {x, 0, 0};
  const double tu = iv.time_to_unit(t);
  const SeriesKind kind = tu <= params.t_c ? SeriesKind::FirstKind : SeriesKind::SecondKind;
  ConditionalSample s = sample_conditional_unit(xu, tu, kind, params.max_terms, rng);
  double pos = iv.from_unit(s.position);
  // rounding in the affine map must not land on the boundary
  if (pos <= iv.a()) pos = std::nextafter(iv.a(), iv.b());
  if (pos >= iv.b()) pos = std::nextafter(iv.b(), iv.a());
  s.position = pos;
  return s;
}

}  // namespace exitwise
