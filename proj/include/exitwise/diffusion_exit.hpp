#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "exitwise/rng.hpp"
#include "exitwise/types.hpp"

namespace exitwise {

using RealFn = std::function<double(double)>;

/// A drift together with every constant the exit samplers derive from it on one interval.
///
/// gamma(x) = (mu(x)^2 + mu'(x)) / 2 + rho is the thinning potential, gamma_plus its
/// envelope, delta the integral of mu over the interval. Immutable once built.
class DriftSpec {
 public:
  static constexpr std::size_t kGridPoints = 10'000;
  static constexpr double kSafety = 1e-3;

  /// rho absent: smallest shift making gamma nonnegative on the grid, plus 0.1%.
  /// gamma_plus absent: grid maximum of gamma plus 0.1%.
  /// mu_prime absent: central differences with step 1e-6 max(1, |x|).
  /// Throws NegativeGamma, NonIntegrableDrift or InvalidArgument.
  static DriftSpec build(RealFn mu, std::optional<RealFn> mu_prime, const Interval& iv,
                         std::optional<double> rho = std::nullopt, std::optional<double> gamma_plus = std::nullopt);

  const Interval& iv() const noexcept { return iv_; }
  double rho() const noexcept { return rho_; }
  double gamma_plus() const noexcept { return gamma_plus_; }
  double delta() const noexcept { return delta_; }
  bool derivative_estimated() const noexcept { return derivative_estimated_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t table_size() const noexcept { return knots_.size(); }

  double mu(double x) const { return mu_(x); }
  double mu_prime(double x) const { return mu_prime_(x); }
  double gamma(double x) const;
  /// Integral of mu from a to x, from the interpolated table.
  double antiderivative(double x) const;
  /// Boundary weight min(1, e^{-delta}) exp(antiderivative(x)).
  double beta(double x) const;
  /// exp(antiderivative) normalised by an upper bound of its supremum on [a, b].
  double beta_m(double x) const;

  DriftSpec with_label(std::string label) const;

 private:
  DriftSpec(const Interval& iv) : iv_(iv) {}

  RealFn mu_;
  RealFn mu_prime_;
  Interval iv_;
  double rho_ = 0.0;
  double gamma_plus_ = 0.0;
  double delta_ = 0.0;
  double log_beta_sup_ = 0.0;
  bool derivative_estimated_ = false;
  std::string label_ = "custom";
  // antiderivative table: values and slopes (mu) at uniform knots, cubic Hermite in between
  std::vector<double> knots_;
  std::vector<double> slopes_;
  double step_ = 0.0;
};

/// Same as DriftSpec::build.
DriftSpec build_drift_spec(RealFn mu, std::optional<RealFn> mu_prime, const Interval& iv,
                           std::optional<double> rho = std::nullopt, std::optional<double> gamma_plus = std::nullopt);

// Presets. rho falls back to the preset's exact shift, gamma_plus to the derived envelope.

/// mu = 0, rho = 0.
DriftSpec zero_drift(const Interval& iv, std::optional<double> gamma_plus = std::nullopt);
/// mu = 2 + sin x, rho = 0.
DriftSpec sin_drift(const Interval& iv, std::optional<double> rho = std::nullopt,
                    std::optional<double> gamma_plus = std::nullopt);
/// Ornstein-Uhlenbeck mu = -mu0 x, rho = mu0 / 2.
DriftSpec ou_drift(double mu0, const Interval& iv, std::optional<double> rho = std::nullopt,
                   std::optional<double> gamma_plus = std::nullopt);
/// Drift parsed from an expression in x; derivative taken symbolically, rho derived.
DriftSpec expr_drift(const std::string& expression, const Interval& iv, std::optional<double> rho = std::nullopt,
                     std::optional<double> gamma_plus = std::nullopt);

struct DiffusionExitSample {
  double time;
  double location;
  std::uint64_t n_tot;     ///< series terms and sandwich refinements spent
  std::uint64_t n_it;      ///< capped-sampler calls (chained sampler only, else 1)
  bool capped;             ///< capped sampler stopped at the time cap inside the interval
  std::uint64_t restarts;  ///< rejected attempts
};

/// Exit of dX = mu(X) dt + dB from the interval. Requires rho = 0 unless tilted is set, in
/// which case the output law is the exit law reweighted by exp(-rho tau) and normalised.
/// Per loop the stream is read as: exponential clock, Brownian exit, uniform U,
/// conditional position, uniform V.
DiffusionExitSample sample_det(const DriftSpec& spec, double x, const SeriesParams& params, RngStream& rng,
                               bool tilted = false);

/// Position and time of the diffusion stopped at min(tau, kappa).
DiffusionExitSample sample_kdet(const DriftSpec& spec, double x, double kappa, const SeriesParams& params,
                                RngStream& rng);

/// Exit by chaining capped runs until the boundary is reached; any rho.
DiffusionExitSample sample_gdet(const DriftSpec& spec, double x, std::optional<double> kappa, const SeriesParams& params,
                                RngStream& rng);

/// 1 / rho when rho > 0, otherwise (b - a)^2.
double default_kappa(const DriftSpec& spec);

/// E[exp(-gamma_plus tau)] for Brownian motion started at the midpoint: 1 / cosh(sqrt(gamma_plus / 2) (b - a)).
double laplace_cosh(double gamma_plus, const Interval& iv);

/// Supremum over a log-spaced time grid of the conditional-sampler cost bound,
/// small-time bound below t_c and large-time bound (at the midpoint) above.
double conditional_cost_sup(double t_c);

/// Cost bound (C0 + C1) / (E_x[exp(-rho tau)] cosh-Laplace) for the plain sampler.
/// With rho > 0 the expectation is a Monte Carlo estimate over mc_samples chained runs.
double efficiency_bound_det(const DriftSpec& spec, double x, const SeriesParams& params, std::uint64_t seed = 1,
                            std::size_t mc_samples = 2000);

}  // namespace exitwise
