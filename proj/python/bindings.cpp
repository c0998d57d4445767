#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "exitwise/batch.hpp"
#include "exitwise/brownian_exit.hpp"
#include "exitwise/conditional_position.hpp"
#include "exitwise/diffusion_exit.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/special_fn.hpp"
#include "exitwise/validation.hpp"

namespace py = pybind11;
using namespace exitwise;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace {

SeriesParams make_params(double t_e, double t_c, std::size_t max_terms) {
  SeriesParams p;
  p.t_e = t_e;
  p.t_c = t_c;
  p.max_terms = max_terms;
  p.validate();
  return p;
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> a(py::ssize_t(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

DriftSpec make_drift(const std::string& drift, const Interval& iv, double mu0, const std::string& expr,
                     std::optional<double> rho, std::optional<double> gamma_plus) {
  if (drift == "zero") return zero_drift(iv, gamma_plus);
  if (drift == "sin") return sin_drift(iv, rho, gamma_plus);
  if (drift == "ou") return ou_drift(mu0, iv, rho, gamma_plus);
  if (drift == "expr") return expr_drift(expr, iv, rho, gamma_plus);
  throw InvalidArgument("unknown drift '" + drift + "' (expected zero, sin, ou or expr)");
}

py::dict conditional(double x, double a, double b, double t, std::size_t n, std::uint64_t seed, std::uint64_t streams,
                     double t_e, double t_c, std::size_t max_terms) {
  const Interval iv(a, b);
  const SeriesParams p = make_params(t_e, t_c, max_terms);
  std::vector<ConditionalSample> s;
  {
    py::gil_scoped_release nogil;
    s = sample_batch(n, seed, streams, [&](std::size_t, RngStream& rng) { return sample_conditional(x, iv, t, p, rng); });
  }
  std::vector<double> pos;
  std::vector<std::uint64_t> nc;
  for (const auto& v : s) {
    pos.push_back(v.position);
    nc.push_back(v.n_c);
  }
  py::dict d;
  d["position"] = to_array(pos);
  d["n_c"] = to_array(nc);
  return d;
}

py::dict brownian(double x, double a, double b, std::size_t n, std::uint64_t seed, std::uint64_t streams, double t_e,
                  double t_c, std::size_t max_terms) {
  const Interval iv(a, b);
  const SeriesParams p = make_params(t_e, t_c, max_terms);
  std::vector<ExitSample> s;
  {
    py::gil_scoped_release nogil;
    s = sample_batch(n, seed, streams, [&](std::size_t, RngStream& rng) { return sample_exit(x, iv, p, rng); });
  }
  std::vector<double> time, loc;
  std::vector<std::uint64_t> cnt;
  for (const auto& v : s) {
    time.push_back(v.time);
    loc.push_back(v.location);
    cnt.push_back(v.n_as);
  }
  py::dict d;
  d["time"] = to_array(time);
  d["location"] = to_array(loc);
  d["n_as"] = to_array(cnt);
  return d;
}

py::dict diffusion(const std::string& drift, double x, double a, double b, const std::string& algo, std::size_t n,
                   std::uint64_t seed, std::uint64_t streams, double mu0, const std::string& expr,
                   std::optional<double> kappa, std::optional<double> rho, std::optional<double> gamma_plus, bool tilted,
                   double t_e, double t_c, std::size_t max_terms) {
  const Interval iv(a, b);
  const SeriesParams p = make_params(t_e, t_c, max_terms);
  const DriftSpec spec = make_drift(drift, iv, mu0, expr, rho, gamma_plus);
  if (algo != "det" && algo != "kdet" && algo != "gdet") throw InvalidArgument("algo must be det, kdet or gdet");
  const double cap = kappa ? *kappa : default_kappa(spec);
  std::vector<DiffusionExitSample> s;
  {
    py::gil_scoped_release nogil;
    s = sample_batch(n, seed, streams, [&](std::size_t, RngStream& rng) {
      if (algo == "det") return sample_det(spec, x, p, rng, tilted);
      if (algo == "kdet") return sample_kdet(spec, x, cap, p, rng);
      return sample_gdet(spec, x, cap, p, rng);
    });
  }
  std::vector<double> time, loc;
  std::vector<std::uint64_t> tot, it, restarts;
  std::vector<bool> capped;
  for (const auto& v : s) {
    time.push_back(v.time);
    loc.push_back(v.location);
    tot.push_back(v.n_tot);
    it.push_back(v.n_it);
    restarts.push_back(v.restarts);
    capped.push_back(v.capped);
  }
  py::array_t<bool> cap_arr(py::ssize_t(capped.size()));
  for (std::size_t i = 0; i < capped.size(); ++i) cap_arr.mutable_data()[i] = capped[i];
  py::dict d;
  d["time"] = to_array(time);
  d["location"] = to_array(loc);
  d["n_tot"] = to_array(tot);
  d["n_it"] = to_array(it);
  d["restarts"] = to_array(restarts);
  d["capped"] = cap_arr;
  d["rho"] = spec.rho();
  d["gamma_plus"] = spec.gamma_plus();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact simulation of diffusion exit times from an interval";

  py::register_exception<Error>(m, "ExitwiseError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<AbortMaxTerms>(m, "AbortMaxTerms", PyExc_RuntimeError);

  m.def("gauss_pdf", &gauss_pdf, py::arg("x"));
  m.def("gauss_cdf", &gauss_cdf, py::arg("x"));
  m.def("erf", &exitwise::erf, py::arg("x"));
  m.def("erfc", &exitwise::erfc, py::arg("x"));
  m.def("efficiency_bound_u1", &efficiency_bound_u1, py::arg("t"));
  m.def("efficiency_bound_u2", &efficiency_bound_u2, py::arg("t"), py::arg("x"));
  m.def("efficiency_bound_symmetric", &efficiency_bound_symmetric, py::arg("t_e"));
  m.def("laplace_cosh", [](double g, double a, double b) { return laplace_cosh(g, Interval(a, b)); },
        py::arg("gamma_plus"), py::arg("a"), py::arg("b"));
  m.def("survival_probability", &survival_probability, py::arg("t"), py::arg("x"), py::arg("t_c") = 0.7,
        "P_x(tau > t) for Brownian motion on [-1, 1]");
  m.def(
      "density",
      [](double t, double x, double y, const std::string& kind) {
        return density(t, x, y, kind == "second" ? SeriesKind::SecondKind : SeriesKind::FirstKind).value;
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("kind") = "first",
      "killed Brownian transition density on [-1, 1]; kind is 'first' or 'second'");

  m.def("conditional", &conditional, py::arg("x"), py::arg("a"), py::arg("b"), py::arg("t"), py::arg("n"),
        py::arg("seed") = 1, py::arg("streams") = 0, py::arg("t_e") = 0.5, py::arg("t_c") = 0.7,
        py::arg("max_terms") = 10'000);
  m.def("brownian_exit", &brownian, py::arg("x"), py::arg("a"), py::arg("b"), py::arg("n"), py::arg("seed") = 1,
        py::arg("streams") = 0, py::arg("t_e") = 0.5, py::arg("t_c") = 0.7, py::arg("max_terms") = 10'000);
  m.def("diffusion_exit", &diffusion, py::arg("drift"), py::arg("x"), py::arg("a"), py::arg("b"), py::arg("algo") = "det",
        py::arg("n") = 1000, py::arg("seed") = 1, py::arg("streams") = 0, py::arg("mu0") = 1.0, py::arg("expr") = "",
        py::arg("kappa") = py::none(), py::arg("rho") = py::none(), py::arg("gamma_plus") = py::none(),
        py::arg("tilted") = false, py::arg("t_e") = 0.5, py::arg("t_c") = 0.7, py::arg("max_terms") = 10'000);

  m.def(
      "ks_two_sample",
      [](std::vector<double> s1, std::vector<double> s2) {
        const KsReport r = ks_two_sample(std::move(s1), std::move(s2));
        return py::dict(py::arg("statistic") = r.statistic, py::arg("threshold") = r.threshold,
                        py::arg("pass_99") = r.pass_99);
      },
      py::arg("s1"), py::arg("s2"));
  m.def(
      "validate",
      [](const std::string& suite, std::uint64_t seed, double scale) {
        SuiteReport r;
        {
          py::gil_scoped_release nogil;
          r = run_suite(suite, SuiteOptions{seed, scale});
        }
        return r.to_json();
      },
      py::arg("suite"), py::arg("seed") = 20240607, py::arg("scale") = 1.0, "run a validation suite, returns JSON text");

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
