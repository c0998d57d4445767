#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exitwise/diffusion_exit.hpp"
#include "exitwise/rng.hpp"

namespace exitwise {

/// Asymptotic 99% Kolmogorov-Smirnov coefficient.
inline constexpr double kKs99 = 1.628;

struct EulerConfig {
  double dt = 1e-4;
  std::uint64_t max_steps = 100'000'000;
};

struct EulerExit {
  double time;
  double location;
  std::uint64_t steps;
};

/// Euler-Maruyama reference: X += mu(X) dt + sqrt(dt) G until X leaves (a, b), monitored
/// at grid times only. Biased towards longer exit times. A start on the boundary returns
/// time 0 there. Throws MaxStepsExceeded on reaching cfg.max_steps.
EulerExit euler_exit(const DriftSpec& spec, double x, const EulerConfig& cfg, RngStream& rng);

struct KsReport {
  double statistic;
  std::size_t n1;
  std::size_t n2;  ///< 0 for the one-sample test
  double threshold;
  bool pass_99;
};

/// Two-sample statistic sup |F1 - F2|. Inputs need not be sorted. Both sizes must be >= 100.
KsReport ks_two_sample(std::vector<double> s1, std::vector<double> s2);
/// One-sample statistic sup |F_n - cdf|. Size must be >= 100.
KsReport ks_one_sample(std::vector<double> s, const std::function<double(double)>& cdf);
/// One-sided two-sample statistic sup (F_hi - F_lo): small when s_hi is stochastically
/// at least as large as s_lo.
KsReport ks_one_sided(std::vector<double> s_lo, std::vector<double> s_hi);

struct Moments {
  std::size_t n;
  double mean;
  double stddev;  ///< sample standard deviation (n - 1 denominator)
  double se;      ///< standard error of the mean
};
Moments moments(const std::vector<double>& v);
/// Standard error of a frequency estimate of p from n trials.
double binomial_se(double p, std::size_t n);
/// Upper tail of the chi-square law with an integer number of degrees of freedom.
double chi_square_sf(double x, int dof);
/// Pearson chi-square statistic of an r x c contingency table (row-major).
double contingency_chi_square(const std::vector<std::vector<double>>& table);

/// Exit-time distribution function of [-1, 1] for Brownian motion started at 0.
double symmetric_exit_cdf(double t);

struct Check {
  std::string name;
  double value;
  double threshold;  ///< what value is compared to; see name for the direction
  bool pass;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
  std::string to_json() const;
  std::string table() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20240607;
  /// Scales every sample count; 1 is the full suite.
  double scale = 1.0;
};

/// Suites: "brownian", "sin", "ou". Throws InvalidArgument for other names.
SuiteReport run_suite(const std::string& suite, const SuiteOptions& opts = {});

}  // namespace exitwise
