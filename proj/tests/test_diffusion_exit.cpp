#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "exitwise/batch.hpp"
#include "exitwise/brownian_exit.hpp"
#include "exitwise/diffusion_exit.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/validation.hpp"

using namespace exitwise;

namespace {

std::vector<double> times(const std::vector<DiffusionExitSample>& v) {
  std::vector<double> t;
  t.reserve(v.size());
  for (const auto& s : v) t.push_back(s.time);
  return t;
}

double frac_at(const std::vector<DiffusionExitSample>& v, double where) {
  double c = 0.0;
  for (const auto& s : v) c += s.location == where ? 1.0 : 0.0;
  return c / double(v.size());
}

std::vector<double> grid(const Interval& iv, int n = 10'000) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(iv.a() + iv.width() * i / (n - 1));
  return g;
}

}  // namespace

TEST_CASE("sin drift constants") {
  const Interval iv(-0.5, 0.5);
  const DriftSpec s = sin_drift(iv);
  CHECK(s.rho() == 0.0);
  double gmax = 0.0;
  for (double x : grid(iv)) {
    const double g = s.gamma(x);
    CHECK(g >= 0.0);
    CHECK(g <= 5.0);
    gmax = std::max(gmax, g);
  }
  CHECK(s.gamma_plus() >= gmax);
  CHECK(s.gamma_plus() == doctest::Approx(gmax * (1.0 + DriftSpec::kSafety)).epsilon(1e-9));
  // closed forms: int_a^x (2 + sin u) du = 2 (x - a) - cos x + cos a, delta = 2
  CHECK(s.delta() == doctest::Approx(2.0).epsilon(1e-12));
  double worst = 0.0;
  for (double x : grid(iv, 2001))
    worst = std::max(worst, std::abs(s.antiderivative(x) - (2.0 * (x + 0.5) - std::cos(x) + std::cos(-0.5))));
  CHECK(worst < 1e-9);
  CHECK(s.beta(iv.b()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.beta(iv.a()) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  double bm_max = 0.0;
  for (double x : grid(iv)) {
    const double bm = s.beta_m(x);
    CHECK(bm >= 0.0);
    CHECK(bm <= 1.0);
    bm_max = std::max(bm_max, bm);
  }
  CHECK(bm_max == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("Ornstein-Uhlenbeck constants") {
  for (double mu0 : {0.5, 2.0, 4.0}) {
    const double a = 1.3;
    const Interval iv(-a, a);
    const DriftSpec s = ou_drift(mu0, iv);
    CHECK(s.rho() == doctest::Approx(mu0 / 2.0));
    for (double x : {-1.3, -0.4, 0.0, 0.9}) CHECK(s.gamma(x) == doctest::Approx(mu0 * mu0 * x * x / 2.0).scale(1.0));
    CHECK(s.gamma_plus() <= mu0 * mu0 * a * a / 2.0 * (1.0 + DriftSpec::kSafety) * (1.0 + 1e-12));
    CHECK(s.gamma_plus() >= mu0 * mu0 * a * a / 2.0);
    CHECK(std::abs(s.delta()) < 1e-12);
    CHECK(default_kappa(s) == doctest::Approx(2.0 / mu0));
  }
}

TEST_CASE("zero drift constants") {
  const Interval iv(-1.0, 2.0);
  const DriftSpec s = zero_drift(iv);
  CHECK(s.rho() == 0.0);
  CHECK(s.gamma_plus() == 0.0);
  for (double x : {-1.0, 0.0, 1.5, 2.0}) {
    CHECK(s.gamma(x) == 0.0);
    CHECK(s.beta(x) == 1.0);
  }
  CHECK(default_kappa(s) == 9.0);
}

TEST_CASE("derived shift and rejected constants") {
  const Interval iv(-1.0, 1.0);
  // mu = -2x: gamma = 2x^2 - 1 before the shift
  const DriftSpec s = build_drift_spec([](double x) { return -2.0 * x; }, RealFn([](double) { return -2.0; }), iv);
  CHECK(s.rho() == doctest::Approx(1.0 * (1.0 + DriftSpec::kSafety)));
  CHECK_THROWS_AS(build_drift_spec([](double x) { return -2.0 * x; }, RealFn([](double) { return -2.0; }), iv, 0.5),
                  NegativeGamma);
  CHECK_THROWS_AS(sin_drift(Interval(-0.5, 0.5), std::nullopt, 1.0), InvalidArgument);
  CHECK_NOTHROW(sin_drift(Interval(-0.5, 0.5), std::nullopt, 50.0));
  CHECK_THROWS_AS(build_drift_spec([](double x) { return 1.0 / x; }, std::nullopt, iv), NonIntegrableDrift);
  CHECK_THROWS_AS(build_drift_spec([](double x) { return std::log(x); }, std::nullopt, iv), NonIntegrableDrift);
}

TEST_CASE("estimated derivative and expression drift") {
  const Interval iv(-0.5, 0.5);
  const DriftSpec fd = build_drift_spec([](double x) { return 2.0 + std::sin(x); }, std::nullopt, iv);
  CHECK(fd.derivative_estimated());
  CHECK(fd.mu_prime(0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-8));
  const DriftSpec ex = expr_drift("2 + sin(x)", iv);
  const DriftSpec ref = sin_drift(iv);
  CHECK_FALSE(ex.derivative_estimated());
  CHECK(ex.rho() == 0.0);
  CHECK(ex.gamma_plus() == doctest::Approx(ref.gamma_plus()).epsilon(1e-12));
  CHECK(ex.delta() == doctest::Approx(ref.delta()).epsilon(1e-12));
  CHECK(ex.label() == "expr:2 + sin(x)");
  CHECK_THROWS_AS(expr_drift("2 + ", iv), ParseError);
}

TEST_CASE("Laplace transform closed form") {
  CHECK(laplace_cosh(0.0, Interval(-3.0, 3.0)) == 1.0);
  CHECK(laplace_cosh(2.0, Interval(-1.0, 1.0)) == doctest::Approx(0.2658022288340796921).epsilon(1e-14));
  CHECK_THROWS_AS(laplace_cosh(-1.0, Interval(-1.0, 1.0)), InvalidArgument);
}

TEST_CASE("zero drift reproduces the Brownian exit sampler pathwise") {
  const Interval iv(-1.0, 1.5);
  const DriftSpec s = zero_drift(iv);
  const SeriesParams params;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RngStream r1(77, i), r2(77, i);
    const DiffusionExitSample d = sample_det(s, 0.2, params, r1);
    const ExitSample e = sample_exit(0.2, iv, params, r2);
    REQUIRE(d.time == e.time);
    REQUIRE(d.location == e.location);
    REQUIRE(d.restarts == 0);
  }
}

TEST_CASE("plain sampler on the sin drift") {
  const Interval iv(-0.5, 0.5);
  const DriftSpec s = sin_drift(iv);
  const SeriesParams params;
  const auto v = sample_batch(100'000, 1, 0, [&](std::size_t, RngStream& r) { return sample_det(s, 0.0, params, r); });
  const Moments m = moments(times(v));
  CHECK(std::abs(m.mean - 0.17927) < 0.003);
  CHECK(std::abs(m.stddev - 0.13667) < 0.003);
  CHECK(std::abs(frac_at(v, iv.a()) - 0.12685) < 0.004);
  bool boundary = true;
  for (const auto& d : v) boundary = boundary && (d.location == iv.a() || d.location == iv.b()) && d.time > 0.0;
  CHECK(boundary);

  // restarts are geometric with success probability min(1, e^-delta) exp(int_a^x mu) = exp(cos(0.5) - 2)
  const double p = std::exp(std::cos(0.5) - 2.0);
  double zero = 0.0, mean_r = 0.0;
  for (const auto& d : v) {
    zero += d.restarts == 0 ? 1.0 : 0.0;
    mean_r += double(d.restarts);
  }
  zero /= double(v.size());
  mean_r /= double(v.size());
  CHECK(std::abs(zero - p) < 3.0 * binomial_se(p, v.size()));
  const double geo_sd = std::sqrt(1.0 - p) / p;
  CHECK(std::abs(mean_r - (1.0 / zero - 1.0)) < 3.0 * geo_sd / std::sqrt(double(v.size())) + 3.0 * binomial_se(p, v.size()) / (p * p));

  // cost bound with rho = 0
  double nt = 0.0;
  for (const auto& d : v) nt += double(d.n_tot);
  CHECK(nt / double(v.size()) <= efficiency_bound_det(s, 0.0, params));
}

TEST_CASE("plain sampler needs rho = 0 unless tilted") {
  const Interval iv(-1.0, 1.0);
  const DriftSpec ou = ou_drift(2.0, iv);
  const SeriesParams params;
  RngStream r(1, 1);
  CHECK_THROWS_AS(sample_det(ou, 0.0, params, r), RhoNotZero);
  const DiffusionExitSample t = sample_det(ou, 0.0, params, r, true);
  CHECK((t.location == -1.0 || t.location == 1.0));
  CHECK_THROWS_AS(sample_det(sin_drift(Interval(-0.5, 0.5)), 0.5, params, r), InvalidArgument);
}

TEST_CASE("capped sampler: cap property on OU") {
  const Interval iv(-1.0, 1.0);
  const DriftSpec ou = ou_drift(2.0, iv);
  const SeriesParams params;
  const double kappa = 0.5;
  const auto v = sample_batch(100'000, 3, 0, [&](std::size_t, RngStream& r) { return sample_kdet(ou, 0.0, kappa, params, r); });
  std::size_t bad = 0;
  for (const auto& d : v) {
    const bool interior = d.location > iv.a() && d.location < iv.b();
    const bool boundary = d.location == iv.a() || d.location == iv.b();
    if (d.time > kappa || d.time <= 0.0 || d.capped != interior || (!d.capped && !boundary) || (d.capped && d.time != kappa))
      ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("capped sampler with a large cap matches the plain sampler") {
  const Interval iv(-0.5, 0.5);
  const DriftSpec s = sin_drift(iv);
  const SeriesParams params;
  const auto det = sample_batch(10'000, 41, 0, [&](std::size_t, RngStream& r) { return sample_det(s, 0.1, params, r); });
  const auto kd = sample_batch(10'000, 43, 0, [&](std::size_t, RngStream& r) { return sample_kdet(s, 0.1, 50.0, params, r); });
  const auto gd =
      sample_batch(10'000, 47, 0, [&](std::size_t, RngStream& r) { return sample_gdet(s, 0.1, 50.0, params, r); });
  CHECK(ks_two_sample(times(det), times(kd)).pass_99);
  CHECK(ks_two_sample(times(det), times(gd)).pass_99);
  std::size_t capped = 0;
  for (const auto& d : kd) capped += d.capped ? 1 : 0;
  CHECK(capped == 0);
  const double pa = frac_at(det, iv.a()), pk = frac_at(kd, iv.a());
  CHECK(std::abs(pa - pk) < 3.0 * std::sqrt(2.0 * pa * (1 - pa) / 10'000.0));
}

TEST_CASE("uncapped part of the capped sampler matches chained runs that exit before the cap") {
  const Interval iv(-1.0, 1.0);
  const DriftSpec ou = ou_drift(2.0, iv);
  const SeriesParams params;
  const double kappa = 0.5;
  const auto kd = sample_batch(200'000, 53, 0, [&](std::size_t, RngStream& r) { return sample_kdet(ou, 0.3, kappa, params, r); });
  const auto gd = sample_batch(200'000, 59, 0, [&](std::size_t, RngStream& r) { return sample_gdet(ou, 0.3, 0.2, params, r); });
  std::vector<double> a, b;
  for (const auto& d : kd)
    if (!d.capped) a.push_back(d.time);
  for (const auto& d : gd)
    if (d.time <= kappa) b.push_back(d.time);
  REQUIRE(a.size() > 1000);
  REQUIRE(b.size() > 1000);
  CHECK(ks_two_sample(a, b).pass_99);
  // the capped fraction matches the chained estimate of P(tau > kappa)
  const double pk = 1.0 - double(a.size()) / double(kd.size()), pg = 1.0 - double(b.size()) / double(gd.size());
  CHECK(std::abs(pk - pg) < 3.0 * std::sqrt(pk * (1 - pk) / 200'000.0 + pg * (1 - pg) / 200'000.0));
}

TEST_CASE("chained sampler on OU: iterations and agreement with Euler") {
  const Interval iv(-1.0, 1.0);
  const DriftSpec ou = ou_drift(2.0, iv);
  const SeriesParams params;
  const double kappa = 0.5;
  const auto g = sample_batch(10'000, 61, 0, [&](std::size_t, RngStream& r) { return sample_gdet(ou, 0.0, kappa, params, r); });
  const EulerConfig cfg;
  const auto e = sample_batch(10'000, 67, 0, [&](std::size_t, RngStream& r) { return euler_exit(ou, 0.0, cfg, r); });
  std::vector<double> et;
  double eb = 0.0;
  for (const auto& x : e) {
    et.push_back(x.time);
    eb += x.location == iv.b() ? 1.0 : 0.0;
  }
  const Moments em = moments(et);
  double it = 0.0;
  for (const auto& d : g) it += double(d.n_it);
  CHECK(it / double(g.size()) <= 1.0 + em.mean / kappa);
  CHECK(ks_two_sample(times(g), et).pass_99);
  const double pg = frac_at(g, iv.b()), pe = eb / double(e.size());
  CHECK(std::abs(pg - pe) < 3.0 * std::sqrt(0.5 * 0.5 * 2.0 / 10'000.0));
  bool boundary = true;
  for (const auto& d : g) boundary = boundary && (d.location == iv.a() || d.location == iv.b()) && !d.capped;
  CHECK(boundary);
}

TEST_CASE("OU exit time grows with the mean-reversion strength") {
  const Interval iv(-1.0, 1.0);
  const SeriesParams params;
  const DriftSpec weak = ou_drift(1.0, iv), strong = ou_drift(4.0, iv);
  const auto w = sample_batch(10'000, 71, 0, [&](std::size_t, RngStream& r) { return sample_gdet(weak, 0.0, 0.5, params, r); });
  const auto s = sample_batch(10'000, 73, 0, [&](std::size_t, RngStream& r) { return sample_gdet(strong, 0.0, 0.25, params, r); });
  CHECK(ks_one_sided(times(w), times(s)).pass_99);
  CHECK_FALSE(ks_one_sided(times(s), times(w)).pass_99);
}

TEST_CASE("cost bound grows with the interval") {
  const SeriesParams params;
  double prev = 0.0;
  for (double a : {0.5, 1.0, 1.5}) {
    const double b = efficiency_bound_det(sin_drift(Interval(-a, a)), 0.0, params);
    CHECK(b > prev);
    prev = b;
  }
  const double ou = efficiency_bound_det(ou_drift(2.0, Interval(-1.0, 1.0)), 0.0, params, 5, 500);
  CHECK(std::isfinite(ou));
  CHECK(ou > 0.0);
}

TEST_CASE("capped and chained samplers reject bad input and reproduce") {
  const Interval iv(-1.0, 1.0);
  const DriftSpec ou = ou_drift(2.0, iv);
  const SeriesParams params;
  RngStream r(1, 2);
  CHECK_THROWS_AS(sample_kdet(ou, 0.0, 0.0, params, r), InvalidArgument);
  CHECK_THROWS_AS(sample_kdet(ou, 1.0, 0.5, params, r), InvalidArgument);
  RngStream a(9, 9), b(9, 9);
  const auto x = sample_gdet(ou, 0.4, std::nullopt, params, a);
  const auto y = sample_gdet(ou, 0.4, std::nullopt, params, b);
  CHECK(x.time == y.time);
  CHECK(x.location == y.location);
  CHECK(x.n_tot == y.n_tot);
}
