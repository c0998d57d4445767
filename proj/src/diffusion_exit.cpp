#include "exitwise/diffusion_exit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "exitwise/brownian_exit.hpp"
#include "exitwise/conditional_position.hpp"
#include "exitwise/drift_expr.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/special_fn.hpp"

namespace exitwise {

namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kTableTol = 1e-9;
constexpr int kSimpsonDepth = 48;
constexpr std::size_t kMaxTableCells = std::size_t(1) << 18;

struct Simpson {
  const RealFn& f;
  bool ok = true;

  double run(double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
      ok = false;
      return 0.0;
    }
    return refine(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, kSimpsonDepth);
  }

  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm)) {
      ok = false;
      return 0.0;
    }
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0) {
      ok = false;
      return left + right;
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

inline double hermite(double y0, double y1, double d0, double d1, double h, double s) noexcept {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

}  // namespace

DriftSpec DriftSpec::build(RealFn mu, std::optional<RealFn> mu_prime, const Interval& iv, std::optional<double> rho,
                           std::optional<double> gamma_plus) {
  if (!mu) throw InvalidArgument("drift function is empty");
  DriftSpec s(iv);
  s.mu_ = std::move(mu);
  if (mu_prime && *mu_prime) {
    s.mu_prime_ = std::move(*mu_prime);
  } else {
    s.derivative_estimated_ = true;
    RealFn f = s.mu_;
    s.mu_prime_ = [f](double x) {
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      return (f(x + h) - f(x - h)) / (2.0 * h);
    };
  }

  const double a = iv.a(), b = iv.b();
  const double h = (b - a) / double(kGridPoints - 1);
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -g_min;
  double slope_max = 0.0;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double x = i + 1 == kGridPoints ? b : a + h * double(i);
    const double m = s.mu_(x), mp = s.mu_prime_(x);
    if (!std::isfinite(m) || !std::isfinite(mp))
      throw NonIntegrableDrift("drift or its derivative is not finite at x = " + std::to_string(x));
    const double g = 0.5 * (m * m + mp);
    g_min = std::min(g_min, g);
    g_max = std::max(g_max, g);
    slope_max = std::max(slope_max, std::abs(mp));
  }

  if (rho) {
    if (!(*rho >= 0.0) || !std::isfinite(*rho)) throw InvalidArgument("rho must be nonnegative and finite");
    if (g_min + *rho < 0.0)
      throw NegativeGamma("rho = " + std::to_string(*rho) + " leaves gamma negative (grid minimum " +
                          std::to_string(g_min + *rho) + ")");
    s.rho_ = *rho;
  } else {
    s.rho_ = std::max(0.0, -g_min) * (1.0 + kSafety);
  }
  const double gamma_grid_max = g_max + s.rho_;
  if (gamma_plus) {
    if (!(*gamma_plus >= gamma_grid_max) || !std::isfinite(*gamma_plus))
      throw InvalidArgument("gamma_plus = " + std::to_string(*gamma_plus) + " is below the grid maximum " +
                            std::to_string(gamma_grid_max) + " of gamma");
    s.gamma_plus_ = *gamma_plus;
  } else {
    s.gamma_plus_ = std::max(0.0, gamma_grid_max) * (1.0 + kSafety);
  }

  // antiderivative table, refined until the interpolant matches cell-midpoint quadrature
  Simpson quad{s.mu_};
  for (std::size_t cells = 64;; cells *= 2) {
    if (cells > kMaxTableCells) throw NonIntegrableDrift("antiderivative table did not reach tolerance");
    const double step = (b - a) / double(cells);
    const double cell_tol = kQuadTol * step / (b - a);
    std::vector<double> vals(cells + 1), slopes(cells + 1);
    vals[0] = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i <= cells; ++i) {
      const double xi = i == cells ? b : a + step * double(i);
      slopes[i] = s.mu_(xi);
      if (i == 0) continue;
      const double x0 = a + step * double(i - 1);
      vals[i] = vals[i - 1] + quad.run(x0, xi, cell_tol);
      const double mid = 0.5 * (x0 + xi);
      const double exact_mid = vals[i - 1] + quad.run(x0, mid, 0.5 * cell_tol);
      worst = std::max(worst, std::abs(exact_mid - hermite(vals[i - 1], vals[i], slopes[i - 1], slopes[i], step, 0.5)));
    }
    if (!quad.ok) throw NonIntegrableDrift("adaptive quadrature of the drift failed to converge");
    if (worst < kTableTol) {
      s.knots_ = std::move(vals);
      s.slopes_ = std::move(slopes);
      s.step_ = step;
      break;
    }
  }
  s.delta_ = s.knots_.back();

  double anti_max = 0.0;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double x = i + 1 == kGridPoints ? b : a + h * double(i);
    anti_max = std::max(anti_max, s.antiderivative(x));
  }
  for (double v : s.knots_) anti_max = std::max(anti_max, v);
  // between grid points the antiderivative can rise by at most h^2 max|mu'| / 8 above its grid maximum
  s.log_beta_sup_ = anti_max + h * h * slope_max / 8.0 + kTableTol;
  return s;
}

DriftSpec DriftSpec::with_label(std::string label) const {
  DriftSpec copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

double DriftSpec::gamma(double x) const {
  const double m = mu_(x);
  return 0.5 * (m * m + mu_prime_(x)) + rho_;
}

double DriftSpec::antiderivative(double x) const {
  if (x <= iv_.a()) return 0.0;
  if (x >= iv_.b()) return knots_.back();
  const double u = (x - iv_.a()) / step_;
  std::size_t i = std::min(std::size_t(u), knots_.size() - 2);
  const double s = u - double(i);
  return hermite(knots_[i], knots_[i + 1], slopes_[i], slopes_[i + 1], step_, s);
}

double DriftSpec::beta(double x) const { return std::exp(std::min(0.0, -delta_) + antiderivative(x)); }

double DriftSpec::beta_m(double x) const { return std::min(1.0, std::exp(antiderivative(x) - log_beta_sup_)); }

DriftSpec build_drift_spec(RealFn mu, std::optional<RealFn> mu_prime, const Interval& iv, std::optional<double> rho,
                           std::optional<double> gamma_plus) {
  return DriftSpec::build(std::move(mu), std::move(mu_prime), iv, rho, gamma_plus);
}

DriftSpec zero_drift(const Interval& iv, std::optional<double> gamma_plus) {
  return DriftSpec::build([](double) { return 0.0; }, RealFn([](double) { return 0.0; }), iv, 0.0, gamma_plus)
      .with_label("zero");
}

DriftSpec sin_drift(const Interval& iv, std::optional<double> rho, std::optional<double> gamma_plus) {
  return DriftSpec::build([](double x) { return 2.0 + std::sin(x); }, RealFn([](double x) { return std::cos(x); }), iv,
                          rho.value_or(0.0), gamma_plus)
      .with_label("sin");
}

DriftSpec ou_drift(double mu0, const Interval& iv, std::optional<double> rho, std::optional<double> gamma_plus) {
  if (!(mu0 >= 0.0) || !std::isfinite(mu0)) throw InvalidArgument("mean-reversion strength must be nonnegative");
  return DriftSpec::build([mu0](double x) { return -mu0 * x; }, RealFn([mu0](double) { return -mu0; }), iv,
                          rho.value_or(0.5 * mu0), gamma_plus)
      .with_label("ou");
}

DriftSpec expr_drift(const std::string& expression, const Interval& iv, std::optional<double> rho,
                     std::optional<double> gamma_plus) {
  const Expr e = Expr::parse(expression);
  const Expr de = e.derivative();
  return DriftSpec::build([e](double x) { return e(x); }, RealFn([de](double x) { return de(x); }), iv, rho, gamma_plus)
      .with_label("expr:" + expression);
}

namespace {

void require_start(const DriftSpec& spec, double x) {
  if (!spec.iv().contains_strictly(x)) throw InvalidArgument("start must lie strictly inside the interval");
}

inline double draw_clock(double gamma_plus, RngStream& rng) {
  return gamma_plus > 0.0 ? rng.exponential(gamma_plus) : std::numeric_limits<double>::infinity();
}

}  // namespace

DiffusionExitSample sample_det(const DriftSpec& spec, double x, const SeriesParams& params, RngStream& rng, bool tilted) {
  params.validate();
  require_start(spec, x);
  if (spec.rho() > 0.0 && !tilted)
    throw RhoNotZero("plain exit sampler needs rho = 0 (got " + std::to_string(spec.rho()) +
                     "); use the chained sampler or request the tilted law");
  const Interval& iv = spec.iv();
  DiffusionExitSample out{0.0, x, 0, 1, false, 0};
  double z = x, t = 0.0;
  for (;;) {
    const double e = draw_clock(spec.gamma_plus(), rng);
    const ExitSample ex = sample_exit(z, iv, params, rng);
    out.n_tot += ex.n_as;
    const double u = rng.uniform();
    if (ex.time < e) {
      if (u <= spec.beta(ex.location)) {
        out.time = t + ex.time;
        out.location = ex.location;
        return out;
      }
    } else {
      const ConditionalSample c = sample_conditional(z, iv, e, params, rng);
      out.n_tot += c.n_c;
      const double v = rng.uniform();
      if (spec.gamma_plus() * v > spec.gamma(c.position)) {
        z = c.position;
        t += e;
        continue;
      }
    }
    ++out.restarts;
    z = x;
    t = 0.0;
  }
}

DiffusionExitSample sample_kdet(const DriftSpec& spec, double x, double kappa, const SeriesParams& params,
                                RngStream& rng) {
  params.validate();
  require_start(spec, x);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("time cap must be positive and finite");
  const Interval& iv = spec.iv();
  DiffusionExitSample out{0.0, x, 0, 1, false, 0};
  double z = x, t = 0.0, k = kappa;
  for (;;) {
    const double e = draw_clock(spec.gamma_plus(), rng);
    const ExitSample ex = sample_exit(z, iv, params, rng);
    out.n_tot += ex.n_as;
    const double u = rng.uniform();
    const double s = ex.time;
    if (s <= k && s <= e) {
      const double w = rng.uniform();
      if (u <= spec.beta_m(ex.location) && w <= std::exp(-spec.rho() * (k - s))) {
        out.time = std::min(t + s, kappa);
        out.location = ex.location;
        return out;
      }
    } else if (k <= e) {
      const ConditionalSample c = sample_conditional(z, iv, k, params, rng);
      out.n_tot += c.n_c;
      if (u <= spec.beta_m(c.position)) {
        out.time = kappa;
        out.location = c.position;
        out.capped = true;
        return out;
      }
    } else {
      const ConditionalSample c = sample_conditional(z, iv, e, params, rng);
      out.n_tot += c.n_c;
      const double v = rng.uniform();
      if (spec.gamma_plus() * v > spec.gamma(c.position)) {
        z = c.position;
        t += e;
        k -= e;
        continue;
      }
    }
    ++out.restarts;
    z = x;
    t = 0.0;
    k = kappa;
  }
}

double default_kappa(const DriftSpec& spec) {
  if (spec.rho() > 0.0) return 1.0 / spec.rho();
  return spec.iv().width() * spec.iv().width();
}

DiffusionExitSample sample_gdet(const DriftSpec& spec, double x, std::optional<double> kappa, const SeriesParams& params,
                                RngStream& rng) {
  const double cap = kappa ? *kappa : default_kappa(spec);
  DiffusionExitSample out{0.0, x, 0, 0, false, 0};
  double z = x;
  for (;;) {
    const DiffusionExitSample step = sample_kdet(spec, z, cap, params, rng);
    out.time += step.time;
    out.n_tot += step.n_tot;
    out.restarts += step.restarts;
    ++out.n_it;
    z = step.location;
    if (!step.capped) {
      out.location = z;
      return out;
    }
  }
}

double laplace_cosh(double gamma_plus, const Interval& iv) {
  if (!(gamma_plus >= 0.0)) throw InvalidArgument("gamma_plus must be nonnegative");
  return 1.0 / std::cosh(std::sqrt(0.5 * gamma_plus) * iv.width());
}

double conditional_cost_sup(double t_c) {
  if (!(t_c > 0.0)) throw InvalidArgument("t_c must be positive");
  double sup = 0.0;
  // t from 1e-4 to 1e3, 64 points per decade, plus the crossover itself
  for (int i = 0; i <= 7 * 64; ++i) {
    const double t = std::pow(10.0, -4.0 + i / 64.0);
    sup = std::max(sup, t <= t_c ? efficiency_bound_u1(t) : efficiency_bound_u2(t, 0.0));
  }
  sup = std::max(sup, efficiency_bound_u1(t_c));
  return sup;
}

double efficiency_bound_det(const DriftSpec& spec, double x, const SeriesParams& params, std::uint64_t seed,
                            std::size_t mc_samples) {
  params.validate();
  const double c0 = 2.0 * efficiency_bound_symmetric(params.t_e);
  const double c1 = conditional_cost_sup(params.t_c);
  double discount = 1.0;
  if (spec.rho() > 0.0) {
    if (mc_samples == 0) throw InvalidArgument("Monte Carlo sample count must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < mc_samples; ++i) {
      RngStream rng(seed, i);
      acc += std::exp(-spec.rho() * sample_gdet(spec, x, std::nullopt, params, rng).time);
    }
    discount = acc / double(mc_samples);
  }
  return (c0 + c1) / (discount * laplace_cosh(spec.gamma_plus(), spec.iv()));
}

}  // namespace exitwise
