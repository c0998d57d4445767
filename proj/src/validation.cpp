#include "exitwise/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "exitwise/batch.hpp"
#include "exitwise/brownian_exit.hpp"
#include "exitwise/conditional_position.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/special_fn.hpp"

namespace exitwise {

namespace {

// sqrt(-ln(0.01) / 2), the one-sided 99% coefficient
constexpr double kKsOneSided99 = 1.5174;

void require_ks_size(std::size_t n) {
  if (n < 100) throw InvalidArgument("KS statistics need at least 100 samples per set");
}

}  // namespace

EulerExit euler_exit(const DriftSpec& spec, double x, const EulerConfig& cfg, RngStream& rng) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("Euler step must be positive");
  const double a = spec.iv().a(), b = spec.iv().b();
  if (!(x >= a && x <= b)) throw InvalidArgument("Euler start must lie in the interval");
  if (x <= a) return {0.0, a, 0};
  if (x >= b) return {0.0, b, 0};
  const double sdt = std::sqrt(cfg.dt);
  double pos = x;
  for (std::uint64_t k = 1; k <= cfg.max_steps; ++k) {
    pos += spec.mu(pos) * cfg.dt + sdt * rng.gaussian();
    if (pos <= a) return {double(k) * cfg.dt, a, k};
    if (pos >= b) return {double(k) * cfg.dt, b, k};
  }
  throw MaxStepsExceeded("Euler simulation exceeded " + std::to_string(cfg.max_steps) + " steps");
}

KsReport ks_two_sample(std::vector<double> s1, std::vector<double> s2) {
  require_ks_size(s1.size());
  require_ks_size(s2.size());
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  const double n1 = double(s1.size()), n2 = double(s2.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < s1.size() && j < s2.size()) {
    const double v = std::min(s1[i], s2[j]);
    while (i < s1.size() && s1[i] == v) ++i;
    while (j < s2.size() && s2[j] == v) ++j;
    d = std::max(d, std::abs(double(i) / n1 - double(j) / n2));
  }
  const double thr = kKs99 * std::sqrt((n1 + n2) / (n1 * n2));
  return {d, s1.size(), s2.size(), thr, d < thr};
}

KsReport ks_one_sample(std::vector<double> s, const std::function<double(double)>& cdf) {
  require_ks_size(s.size());
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  const double thr = kKs99 / std::sqrt(n);
  return {d, s.size(), 0, thr, d < thr};
}

KsReport ks_one_sided(std::vector<double> s_lo, std::vector<double> s_hi) {
  require_ks_size(s_lo.size());
  require_ks_size(s_hi.size());
  std::sort(s_lo.begin(), s_lo.end());
  std::sort(s_hi.begin(), s_hi.end());
  const double n1 = double(s_lo.size()), n2 = double(s_hi.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < s_lo.size() && j < s_hi.size()) {
    const double v = std::min(s_lo[i], s_hi[j]);
    while (i < s_lo.size() && s_lo[i] == v) ++i;
    while (j < s_hi.size() && s_hi[j] == v) ++j;
    // a violation is s_hi lying left of s_lo, i.e. F_hi above F_lo
    d = std::max(d, double(j) / n2 - double(i) / n1);
  }
  const double thr = kKsOneSided99 * std::sqrt((n1 + n2) / (n1 * n2));
  return {d, s_lo.size(), s_hi.size(), thr, d < thr};
}

Moments moments(const std::vector<double>& v) {
  if (v.size() < 2) throw InvalidArgument("moments need at least two values");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / double(v.size() - 1));
  return {v.size(), mean, sd, sd / std::sqrt(double(v.size()))};
}

double binomial_se(double p, std::size_t n) {
  if (n == 0) throw InvalidArgument("binomial_se needs n > 0");
  return std::sqrt(p * (1.0 - p) / double(n));
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) throw InvalidArgument("chi-square needs dof >= 1");
  if (x <= 0.0) return 1.0;
  const double h = 0.5 * x;
  double sum = 0.0;
  if (dof % 2 == 0) {
    double term = 1.0;
    for (int j = 0; j < dof / 2; ++j) {
      if (j > 0) term *= h / j;
      sum += term;
    }
    return std::exp(-h) * sum;
  }
  double term = std::sqrt(h) / std::tgamma(1.5);
  for (int j = 1; j <= (dof - 1) / 2; ++j) {
    if (j > 1) term *= h / (j - 0.5);
    sum += term;
  }
  return erfc(std::sqrt(h)) + std::exp(-h) * sum;
}

double contingency_chi_square(const std::vector<std::vector<double>>& table) {
  if (table.empty() || table[0].empty()) throw InvalidArgument("empty contingency table");
  const std::size_t r = table.size(), c = table[0].size();
  std::vector<double> rows(r, 0.0), cols(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (table[i].size() != c) throw InvalidArgument("ragged contingency table");
    for (std::size_t j = 0; j < c; ++j) {
      rows[i] += table[i][j];
      cols[j] += table[i][j];
      total += table[i][j];
    }
  }
  double chi = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double expect = rows[i] * cols[j] / total;
      if (expect > 0.0) chi += (table[i][j] - expect) * (table[i][j] - expect) / expect;
    }
  return chi;
}

double symmetric_exit_cdf(double t) {
  if (!(t > 0.0)) return 0.0;
  return 1.0 - survival_probability(t, 0.0);
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["checks"] = nlohmann::json::array();
  for (const Check& c : checks) j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  j["pass"] = passed();
  return j.dump(2);
}

std::string SuiteReport::table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-48s %14s %14s  %s\n", "check", "value", "threshold", "result");
  os << line;
  for (const Check& c : checks) {
    std::snprintf(line, sizeof line, "%-48s %14.6g %14.6g  %s\n", c.name.c_str(), c.value, c.threshold,
                  c.pass ? "PASS" : "FAIL");
    os << line;
  }
  os << "suite " << suite << ": " << (passed() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

namespace {

std::size_t scaled(double base, double scale) { return std::max<std::size_t>(200, std::size_t(base * scale)); }

Check at_most(std::string name, double value, double limit) { return {std::move(name), value, limit, value <= limit}; }
Check at_least(std::string name, double value, double limit) { return {std::move(name), value, limit, value >= limit}; }
Check within(std::string name, double value, double lo, double hi) {
  // threshold reports whichever end of [lo, hi] is nearer
  return {std::move(name) + " in [" + std::to_string(lo).substr(0, 6) + ", " + std::to_string(hi).substr(0, 6) + "]",
          value, value < 0.5 * (lo + hi) ? lo : hi, value >= lo && value <= hi};
}
Check ks_check(std::string name, const KsReport& r) { return {std::move(name), r.statistic, r.threshold, r.pass_99}; }

template <class T, class F>
std::vector<double> column(const std::vector<T>& v, F f) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const T& s : v) out.push_back(f(s));
  return out;
}

std::vector<double> head(const std::vector<double>& v, std::size_t n) {
  return {v.begin(), v.begin() + std::ptrdiff_t(std::min(n, v.size()))};
}

double frequency(const std::vector<double>& locs, double target) {
  return double(std::count(locs.begin(), locs.end(), target)) / double(locs.size());
}

std::vector<EulerExit> euler_batch(const DriftSpec& spec, double x, std::size_t n, std::uint64_t seed) {
  EulerConfig cfg;
  return sample_batch(n, seed, 0, [&](std::size_t, RngStream& rng) { return euler_exit(spec, x, cfg, rng); });
}

SuiteReport brownian_suite(const SuiteOptions& o) {
  SuiteReport rep{"brownian", {}};
  SeriesParams params;
  const std::size_t n_sym = scaled(1e5, o.scale);
  const auto sym = sample_batch(n_sym, o.seed, 0,
                                [&](std::size_t, RngStream& rng) { return sample_exit_symmetric(params, rng); });
  const auto taus = column(sym, [](const SymmetricExitSample& s) { return s.tau; });
  const Moments mt = moments(taus);
  rep.checks.push_back(at_most("symmetric |mean tau - 1| <= 3 SE", std::abs(mt.mean - 1.0), 3.0 * mt.se));
  const Moments mp = moments(column(sym, [](const SymmetricExitSample& s) { return double(s.proposals); }));
  rep.checks.push_back(at_most("symmetric |mean proposals - 2| <= 3 SE", std::abs(mp.mean - 2.0), 3.0 * mp.se));
  const Moments ms = moments(column(sym, [](const SymmetricExitSample& s) { return double(s.n_s); }));
  rep.checks.push_back(at_most("symmetric mean refinements <= bound", ms.mean, efficiency_bound_symmetric(params.t_e)));
  rep.checks.push_back(ks_check("symmetric KS vs analytic cdf", ks_one_sample(taus, symmetric_exit_cdf)));

  const Interval unit(-1.0, 1.0);
  const double x0 = 0.4;
  const std::size_t n_side = scaled(1e5, o.scale);
  const auto ex = sample_batch(n_side, o.seed + 1, 0,
                               [&](std::size_t, RngStream& rng) { return sample_exit(x0, unit, params, rng); });
  const double p_top = frequency(column(ex, [](const ExitSample& s) { return s.location; }), 1.0);
  rep.checks.push_back(at_most("x=0.4 |P(exit at 1) - 0.7| <= 3 SE", std::abs(p_top - 0.7), 3.0 * binomial_se(0.7, n_side)));
  const Moments me = moments(column(ex, [](const ExitSample& s) { return s.time; }));
  rep.checks.push_back(at_most("x=0.4 |mean time - 0.84| <= 3 SE", std::abs(me.mean - 0.84), 3.0 * me.se));

  const std::size_t n_eu = scaled(1e4, o.scale);
  const DriftSpec zero = zero_drift(unit);
  const auto eu = euler_batch(zero, 0.0, n_eu, o.seed + 2);
  const auto eu_t = column(eu, [](const EulerExit& s) { return s.time; });
  const Moments meu = moments(eu_t);
  rep.checks.push_back(within("Euler zero-drift mean time", meu.mean, 0.98, 1.06));
  const auto exact = sample_batch(n_eu, o.seed + 3, 0, [&](std::size_t, RngStream& rng) {
    return sample_det(zero, 0.0, params, rng).time;
  });
  const Moments mx = moments(exact);
  rep.checks.push_back(ks_check("zero-drift exit time KS vs Euler", ks_two_sample(exact, eu_t)));
  rep.checks.push_back(at_least("Euler mean - exact mean >= -3 SE", meu.mean - mx.mean,
                                -3.0 * std::hypot(meu.se, mx.se)));
  return rep;
}

SuiteReport sin_suite(const SuiteOptions& o) {
  SuiteReport rep{"sin", {}};
  SeriesParams params;
  const Interval iv(-0.5, 0.5);
  const DriftSpec spec = sin_drift(iv);
  const std::size_t n = scaled(1e5, o.scale);
  const auto det = sample_batch(n, o.seed, 0, [&](std::size_t, RngStream& rng) { return sample_det(spec, 0.0, params, rng); });
  const auto t = column(det, [](const DiffusionExitSample& s) { return s.time; });
  const auto loc = column(det, [](const DiffusionExitSample& s) { return s.location; });
  const Moments mt = moments(t);
  const Moments mc = moments(column(det, [](const DiffusionExitSample& s) { return double(s.n_tot); }));
  const double pa = frequency(loc, iv.a());
  rep.checks.push_back(within("DET mean exit time", mt.mean, 0.176, 0.183));
  rep.checks.push_back(within("DET exit time std", mt.stddev, 0.133, 0.140));
  rep.checks.push_back(within("DET P(exit at a)", pa, 0.123, 0.131));
  rep.checks.push_back(within("DET mean counter", mc.mean, 7.5, 9.5));
  rep.checks.push_back(within("DET counter std", mc.stddev, 7.5, 10.5));

  const std::size_t n_eu = scaled(1e5, o.scale);
  const auto eu = euler_batch(spec, 0.0, n_eu, o.seed + 1);
  const auto eu_t = column(eu, [](const EulerExit& s) { return s.time; });
  const auto eu_loc = column(eu, [](const EulerExit& s) { return s.location; });
  rep.checks.push_back(within("Euler mean exit time", moments(eu_t).mean, 0.179, 0.186));
  const std::size_t n_ks = scaled(1e4, o.scale);
  rep.checks.push_back(ks_check("DET exit time KS vs Euler", ks_two_sample(head(t, n_ks), head(eu_t, n_ks))));
  const double pa_eu = frequency(head(eu_loc, n_ks), iv.a());
  const double pa_det = frequency(head(loc, n_ks), iv.a());
  rep.checks.push_back(at_most("|P_DET(a) - P_Euler(a)| <= 3 SE", std::abs(pa_det - pa_eu),
                               3.0 * std::sqrt(2.0) * binomial_se(0.5 * (pa_det + pa_eu), n_ks)));
  return rep;
}

SuiteReport ou_suite(const SuiteOptions& o) {
  SuiteReport rep{"ou", {}};
  SeriesParams params;
  const Interval iv(-1.0, 1.0);
  const DriftSpec spec = ou_drift(2.0, iv);
  const double kappa = 0.5;
  const std::size_t n = scaled(1e4, o.scale);
  const auto g = sample_batch(n, o.seed, 0, [&](std::size_t, RngStream& rng) { return sample_gdet(spec, 0.0, kappa, params, rng); });
  const auto t = column(g, [](const DiffusionExitSample& s) { return s.time; });
  const auto loc = column(g, [](const DiffusionExitSample& s) { return s.location; });
  const auto eu = euler_batch(spec, 0.0, n, o.seed + 1);
  const auto eu_t = column(eu, [](const EulerExit& s) { return s.time; });
  const auto eu_loc = column(eu, [](const EulerExit& s) { return s.location; });
  rep.checks.push_back(ks_check("GDET exit time KS vs Euler", ks_two_sample(t, eu_t)));
  const double pb = frequency(loc, iv.b()), pb_eu = frequency(eu_loc, iv.b());
  rep.checks.push_back(at_most("|P_GDET(b) - P_Euler(b)| <= 3 SE", std::abs(pb - pb_eu),
                               3.0 * std::sqrt(2.0) * binomial_se(0.5 * (pb + pb_eu), n)));
  const Moments nit = moments(column(g, [](const DiffusionExitSample& s) { return double(s.n_it); }));
  rep.checks.push_back(at_most("GDET mean iterations <= 1 + E[tau]/kappa", nit.mean, 1.0 + moments(eu_t).mean / kappa));

  const std::size_t n_cap = scaled(1e5, o.scale);
  const auto k = sample_batch(n_cap, o.seed + 2, 0, [&](std::size_t, RngStream& rng) { return sample_kdet(spec, 0.0, kappa, params, rng); });
  double violations = 0.0;
  for (const auto& s : k) {
    const bool interior = iv.contains_strictly(s.location);
    if (s.time > kappa || s.capped != interior || (!interior && s.location != iv.a() && s.location != iv.b())) violations += 1.0;
  }
  rep.checks.push_back(at_most("capped sampler violations", violations, 0.0));
  return rep;
}

}  // namespace

SuiteReport run_suite(const std::string& suite, const SuiteOptions& opts) {
  if (!(opts.scale > 0.0)) throw InvalidArgument("suite scale must be positive");
  if (suite == "brownian") return brownian_suite(opts);
  if (suite == "sin") return sin_suite(opts);
  if (suite == "ou") return ou_suite(opts);
  throw InvalidArgument("unknown suite '" + suite + "' (expected brownian, sin or ou)");
}

}  // namespace exitwise
