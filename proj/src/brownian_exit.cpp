#include "exitwise/brownian_exit.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "exitwise/errors.hpp"
#include "exitwise/special_fn.hpp"

namespace exitwise {

namespace {

constexpr double kStartSnap = 1e-12;

// R_i(m, y) / R_i(1, y), computed without forming either factor.
inline double ratio_small(double m, double y) noexcept { return m * std::exp(-(m * m - 1.0) / (2.0 * y)); }
inline double ratio_large(double m, double y) noexcept { return m * std::exp(-(m * m - 1.0) * kPi * kPi * y / 8.0); }

}  // namespace

double pdf_tau_term(PdfSeries kind, int n, double t) {
  if (n < 1 || n % 2 == 0) throw InvalidArgument("pdf_tau_term needs an odd positive index");
  if (!(t > 0.0)) throw InvalidArgument("pdf_tau_term needs t > 0");
  if (kind == PdfSeries::R1) return 2.0 * n / (t * std::sqrt(t)) * gauss_pdf(n / std::sqrt(t));
  return kPi * n / 2.0 * std::exp(-double(n) * n * kPi * kPi * t / 8.0);
}

double pdf_tau(double t, PdfSeries kind) {
  double sum = 0.0;
  for (int k = 0; k < 100'000; ++k) {
    const double term = pdf_tau_term(kind, 2 * k + 1, t);
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-16 && k > 0) break;
  }
  return sum;
}

SymmetricExitSample sample_exit_symmetric(const SeriesParams& params, RngStream& rng) {
  params.validate();
  const double kappa_e = exit_proposal_kappa(params.t_e);
  SymmetricExitSample out{0.0, 0, 0};
  for (;;) {
    ++out.proposals;
    const ProposalDraw prop = sample_hhat(rng, params.t_e);
    const bool small = prop.branch == ProposalBranch::SmallTime;
    const double y = prop.value;
    const double c = small ? 1.0 : kappa_e;
    const double v = rng.uniform();
    double lower = 0.0;
    double upper = 1.0;
    bool accept = false;
    for (std::size_t n = 1; v < c * upper && !accept; ++n) {
      if (n > params.max_terms)
        throw AbortMaxTerms("symmetric exit sandwich exceeded " + std::to_string(params.max_terms) +
                            " refinements (proposal " + std::to_string(y) + ")");
      ++out.n_s;
      const double m = 4.0 * n;
      const double prev_lower = lower;
      const double prev_upper = upper;
      lower = upper - (small ? ratio_small(m - 1.0, y) : ratio_large(m - 1.0, y));
      upper = lower + (small ? ratio_small(m + 1.0, y) : ratio_large(m + 1.0, y));
      assert(prev_lower <= lower && lower <= upper && upper <= prev_upper);
      (void)prev_lower;
      (void)prev_upper;
      accept = v <= c * lower;
    }
    if (accept) {
      assert(c * lower >= 0.0);
      out.tau = y;
      return out;
    }
  }
}

double efficiency_bound_symmetric(double t_e) {
  SeriesParams p;
  p.t_e = t_e;
  p.validate();
  const double pi2 = kPi * kPi;
  return std::sqrt(t_e / (2.0 * kPi)) * std::exp(-0.5 / t_e) + 1.5 * erfc(std::sqrt(0.5 / t_e)) +
         4.0 / kPi * std::exp(-pi2 * t_e / 8.0) +
         4.0 / (5.0 * kPi) * std::exp(-25.0 * pi2 * t_e / 8.0) / -std::expm1(-5.0 * pi2 * t_e);
}

ExitSample sample_exit(double x, const Interval& iv, const SeriesParams& params, RngStream& rng) {
  params.validate();
  if (!(x >= iv.a() && x <= iv.b())) throw InvalidArgument("start must lie inside the interval");
  const double snap = kStartSnap * iv.width();
  // distances to the lower and upper boundary; the position itself is never compared to a or b
  double dl = x - iv.a();
  double du = iv.b() - x;
  if (dl <= snap) return {0.0, iv.a(), 0, 0};
  if (du <= snap) return {0.0, iv.b(), 0, 0};
  ExitSample out{0.0, 0.0, 0, 0};
  for (;;) {
    const double d = dl < du ? dl : du;
    const SymmetricExitSample sym = sample_exit_symmetric(params, rng);
    out.time += d * d * sym.tau;
    out.n_as += sym.n_s;
    ++out.steps;
    const bool down = rng.uniform() < 0.5;
    if (down) {
      if (dl <= du) {
        out.location = iv.a();
        return out;
      }
      dl -= d;
      du += d;
    } else {
      if (du <= dl) {
        out.location = iv.b();
        return out;
      }
      du -= d;
      dl += d;
    }
  }
}

}  // namespace exitwise
