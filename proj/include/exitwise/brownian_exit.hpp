#pragma once

#include <cstdint>

#include "exitwise/rng.hpp"
#include "exitwise/types.hpp"

namespace exitwise {

/// The two expansions of the exit-time density of [-1, 1] from 0.
/// R1 is the small-time (image) form, R2 the large-time (eigen) form.
enum class PdfSeries { R1, R2 };

/// Term of the chosen expansion at odd index n >= 1.
double pdf_tau_term(PdfSeries kind, int n, double t);
/// Density of the exit time of [-1, 1] from 0, summed from the chosen expansion.
double pdf_tau(double t, PdfSeries kind);

struct SymmetricExitSample {
  double tau;
  std::uint64_t n_s;        ///< sandwich refinements across all proposals
  std::uint64_t proposals;  ///< proposal draws until acceptance
};

/// Exit time of [-1, 1] for Brownian motion started at 0.
/// Throws AbortMaxTerms if one sandwich needs more than params.max_terms refinements.
SymmetricExitSample sample_exit_symmetric(const SeriesParams& params, RngStream& rng);

/// Upper bound on the mean number of sandwich refinements of sample_exit_symmetric.
double efficiency_bound_symmetric(double t_e);

struct ExitSample {
  double time;
  double location;  ///< exactly iv.a() or iv.b()
  std::uint64_t n_as;
  std::uint64_t steps;  ///< symmetric sub-intervals traversed
};

/// Exit time and side of iv for Brownian motion from x, by chaining symmetric exits.
/// A start within 1e-12 (b - a) of a boundary returns time 0 at that boundary.
/// Per step the random draws are consumed as: symmetric exit, then one side uniform.
ExitSample sample_exit(double x, const Interval& iv, const SeriesParams& params, RngStream& rng);

}  // namespace exitwise
