#pragma once

#include <cstddef>
#include <cstdint>

#include "exitwise/rng.hpp"
#include "exitwise/special_fn.hpp"
#include "exitwise/types.hpp"

namespace exitwise {

/// Partial sum of one expansion of the killed transition density on [-1, 1].
struct DensityEval {
  double value;
  std::size_t terms_used;
  double remainder_bound;
};

struct ConditionalSample {
  double position;
  std::uint64_t n_c;        ///< series terms computed across all proposals
  std::uint64_t proposals;  ///< proposals drawn, including those landing outside [-1, 1]
};

// All functions below act on the unit interval [-1, 1] unless an Interval is passed.

/// Small-time expansion, paired: n = 0 gives the direct and first reflected image,
/// n >= 1 the images shifted by +-4n together.
double density_first_kind_term(int n, double t, double x, double y);
/// Large-time (eigenfunction) expansion, n >= 1.
double density_second_kind_term(int n, double t, double x, double y);

/// Uniform bound on the tail beyond paired term n of the small-time expansion, n >= 1.
double remainder_first(int n, double t);
/// Tail bound beyond paired term n that depends on (x, y). Valid for every n >= 0;
/// for n >= 1 it returns remainder_first.
double remainder_first_at(int n, double t, double x, double y);
/// Bound on the tail sum_{k > n} of the large-time expansion, n >= 0.
double remainder_second(int n, double t);

/// p(t, x, y) summed until the remainder bound drops below tol.
/// Throws AbortMaxTerms when that takes more than max_terms terms.
DensityEval density(double t, double x, double y, SeriesKind kind, double tol = 1e-14, std::size_t max_terms = 10'000);

/// Envelope constant with p(t, x, .) <= kappa * proposal_density(t, x, ., kind) on [-1, 1].
double envelope_kappa(double t, double x, SeriesKind kind);
/// Proposal density: Gaussian N(x, t) for FirstKind, (pi/4) sin(pi (y+1)/2) on [-1, 1] for SecondKind.
double proposal_density(double t, double x, double y, SeriesKind kind);
/// Draw from the proposal. FirstKind draws may fall outside [-1, 1].
double proposal_h(double t, double x, SeriesKind kind, RngStream& rng);

/// P_x(tau > t) for Brownian motion on [-1, 1], choosing the series by t <= t_c.
double survival_probability(double t, double x, double t_c = 0.7);
/// P_x(tau > t) from a specific series (FirstKind: image sum, SecondKind: eigen sum).
double survival_probability_series(double t, double x, SeriesKind kind);

/// Position at time t of Brownian motion on [-1, 1] from x, conditioned on tau > t.
ConditionalSample sample_conditional_unit(double x, double t, SeriesKind kind, std::size_t max_terms, RngStream& rng);

/// Position at time t of Brownian motion from x conditioned on not leaving iv before t.
/// Rescales to [-1, 1] and picks the expansion by the rescaled time against params.t_c.
ConditionalSample sample_conditional(double x, const Interval& iv, double t, const SeriesParams& params, RngStream& rng);

}  // namespace exitwise
