#include "exitwise/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "exitwise/batch.hpp"
#include "exitwise/brownian_exit.hpp"
#include "exitwise/conditional_position.hpp"
#include "exitwise/diffusion_exit.hpp"
#include "exitwise/errors.hpp"
#include "exitwise/histogram.hpp"
#include "exitwise/validation.hpp"
#include "json.hpp"

namespace exitwise {

namespace {

using nlohmann::json;

constexpr std::size_t kBlock = 16384;

struct CommonOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::uint64_t streams = 0;
  std::string out = "-";
  std::string summary;
  std::string format = "csv";
  std::string hist;
  std::size_t bins = 100;
  double t_e = 0.5;
  double t_c = 0.7;
  std::size_t max_terms = 10'000;

  SeriesParams params() const {
    SeriesParams p;
    p.t_e = t_e;
    p.t_c = t_c;
    p.max_terms = max_terms;
    p.validate();
    return p;
  }

  json to_json() const {
    return {{"n", n},         {"seed", seed},           {"stream_base", streams}, {"format", format},
            {"t_e", t_e},     {"t_c", t_c},             {"max_terms", max_terms}, {"bins", bins},
            {"out", out},     {"hist", hist}};
  }
};

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--n", c.n, "number of samples")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "generator seed");
  sub->add_option("--streams", c.streams, "stream id of sample 0; sample i uses base + i");
  sub->add_option("--out", c.out, "sample output file, - for stdout");
  sub->add_option("--summary", c.summary, "summary JSON file (default: stderr, 'none' to skip)");
  sub->add_option("--format", c.format, "sample output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--hist", c.hist, "write a histogram CSV of the main column to this file");
  sub->add_option("--bins", c.bins, "histogram bins")->check(CLI::Range(std::size_t(2), std::size_t(1) << 24));
  sub->add_option("--te", c.t_e, "exit-time proposal threshold");
  sub->add_option("--tc", c.t_c, "series crossover time on the unit interval");
  sub->add_option("--max-terms", c.max_terms, "per-decision series term cap");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Running mean and variance.
struct Running {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / double(n);
    m2 += d * (v - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / double(n - 1)) : 0.0; }
};

struct Row {
  std::vector<std::string> csv;  // already formatted, in header order
  double value;                  // main column for stats and histogram
  std::optional<double> location;
  double counter;
};

struct Job {
  std::string command;
  std::vector<std::string> header;
  std::string value_name;
  std::string counter_name;
  std::optional<Interval> iv;
  json config;
  std::function<Row(std::size_t, RngStream&)> draw;
};

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path == "-" || path.empty()) {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidArgument("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

int execute(const Job& job, const CommonOptions& c, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Sink sink(c.out, out);
  std::ostream& os = sink.get();
  const bool as_json = c.format == "json";
  if (as_json) {
    os << "[\n";
  } else {
    for (std::size_t k = 0; k < job.header.size(); ++k) os << (k ? "," : "") << job.header[k];
    os << '\n';
  }

  Running value, counter;
  std::size_t at_a = 0, at_b = 0, interior = 0;
  std::vector<double> kept;
  if (!c.hist.empty()) kept.reserve(c.n);
  const unsigned workers = worker_count();

  for (std::size_t begin = 0; begin < c.n; begin += kBlock) {
    const std::size_t count = std::min(kBlock, c.n - begin);
    const auto rows = sample_batch(
        count, c.seed, c.streams + begin, [&](std::size_t i, RngStream& rng) { return job.draw(begin + i, rng); },
        workers);
    for (std::size_t i = 0; i < count; ++i) {
      const Row& r = rows[i];
      if (as_json) {
        json o;
        o["sample_index"] = begin + i;
        for (std::size_t k = 1; k < job.header.size(); ++k) o[job.header[k]] = json::parse(r.csv[k - 1]);
        os << (begin + i ? ",\n" : "") << o.dump();
      } else {
        os << begin + i;
        for (const auto& f : r.csv) os << ',' << f;
        os << '\n';
      }
      value.add(r.value);
      counter.add(r.counter);
      if (r.location && job.iv) {
        if (*r.location == job.iv->a()) ++at_a;
        else if (*r.location == job.iv->b()) ++at_b;
        else ++interior;
      }
      if (!c.hist.empty()) kept.push_back(r.value);
    }
  }
  if (as_json) os << "\n]\n";
  os.flush();

  if (!c.hist.empty()) {
    std::ofstream h(c.hist, std::ios::binary);
    if (!h) throw InvalidArgument("cannot open '" + c.hist + "' for writing");
    h << histogram_csv(histogram(kept, c.bins));
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.summary != "none") {
    json s;
    s["version"] = kVersion;
    s["command"] = job.command;
    s["config"] = job.config;
    s["config"]["common"] = c.to_json();
    s["n"] = value.n;
    s["value"] = job.value_name;
    s["mean"] = value.mean;
    s["std"] = value.stddev();
    if (job.iv) {
      const double n = double(value.n);
      s["side_frequency"] = {{"a", at_a / n}, {"b", at_b / n}, {"interior", interior / n}};
    }
    s["counter"] = {{"name", job.counter_name}, {"mean", counter.mean}, {"std", counter.stddev()}};
    s["workers"] = workers;
    s["wall_time_s"] = wall;
    if (c.summary.empty()) {
      err << s.dump(2) << '\n';
    } else {
      std::ofstream f(c.summary, std::ios::binary);
      if (!f) throw InvalidArgument("cannot open '" + c.summary + "' for writing");
      f << s.dump(2) << '\n';
    }
  }
  return 0;
}

struct IntervalOptions {
  double x = 0.0, a = -1.0, b = 1.0;
  void add(CLI::App* sub) {
    sub->add_option("--x", x, "start position");
    sub->add_option("--a", a, "lower boundary");
    sub->add_option("--b", b, "upper boundary");
  }
  Interval interval() const {
    Interval iv(a, b);
    if (!iv.contains_strictly(x)) throw InvalidArgument("--x must lie strictly inside (--a, --b)");
    return iv;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact simulation of diffusion exit times and positions from an interval", "exitwise"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions c_cond, c_bm, c_diff;
  IntervalOptions i_cond, i_bm, i_diff;

  auto* cond = app.add_subcommand("conditional", "position at time t given no exit before t");
  double t_cond = 0.5;
  add_common(cond, c_cond);
  i_cond.add(cond);
  cond->add_option("--t", t_cond, "time")->required();

  auto* bm = app.add_subcommand("brownian-exit", "Brownian exit time and side");
  add_common(bm, c_bm);
  i_bm.add(bm);

  auto* diff = app.add_subcommand("diffusion-exit", "exit time and side of dX = mu(X) dt + dB");
  add_common(diff, c_diff);
  i_diff.add(diff);
  std::string drift = "zero", algo = "det", expr;
  double mu0 = 1.0;
  std::optional<double> kappa, rho, gamma_plus;
  bool tilted = false;
  diff->add_option("--drift", drift, "drift preset")->check(CLI::IsMember({"zero", "sin", "ou", "expr"}));
  diff->add_option("--mu0", mu0, "mean-reversion strength of the ou preset");
  diff->add_option("--expr", expr, "drift expression in x for --drift expr");
  diff->add_option("--algo", algo, "sampler")->check(CLI::IsMember({"det", "kdet", "gdet"}));
  diff->add_option("--kappa", kappa, "time cap for kdet and gdet (default 1/rho, or (b-a)^2 when rho = 0)");
  diff->add_option("--rho", rho, "shift making gamma nonnegative (default: derived)");
  diff->add_option("--gamma-plus", gamma_plus, "upper bound of gamma (default: derived)");
  diff->add_flag("--tilted", tilted, "allow det with rho > 0; samples the exp(-rho tau)-tilted law");

  auto* val = app.add_subcommand("validate", "run a statistical validation suite");
  std::string suite = "brownian", report;
  SuiteOptions sopts;
  val->add_option("--suite", suite, "suite")->check(CLI::IsMember({"brownian", "sin", "ou", "all"}));
  val->add_option("--report", report, "write the JSON report here");
  val->add_option("--seed", sopts.seed, "generator seed");
  val->add_option("--scale", sopts.scale, "multiply every sample count")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 1;
  }

  try {
    if (*cond) {
      const Interval iv = i_cond.interval();
      const SeriesParams p = c_cond.params();
      if (!(t_cond >= 0.0) || !std::isfinite(t_cond)) throw InvalidArgument("--t must be nonnegative");
      const double x = i_cond.x;
      Job job{"conditional", {"sample_index", "position", "n_c"}, "position", "n_c", std::nullopt,
              {{"x", x}, {"a", iv.a()}, {"b", iv.b()}, {"t", t_cond}}, nullptr};
      job.draw = [&](std::size_t, RngStream& rng) {
        const ConditionalSample s = sample_conditional(x, iv, t_cond, p, rng);
        return Row{{fmt(s.position), std::to_string(s.n_c)}, s.position, std::nullopt, double(s.n_c)};
      };
      return execute(job, c_cond, out, err);
    }
    if (*bm) {
      const Interval iv = i_bm.interval();
      const SeriesParams p = c_bm.params();
      const double x = i_bm.x;
      Job job{"brownian-exit", {"sample_index", "time", "location", "n_as"}, "time", "n_as", iv,
              {{"x", x}, {"a", iv.a()}, {"b", iv.b()}}, nullptr};
      job.draw = [&](std::size_t, RngStream& rng) {
        const ExitSample s = sample_exit(x, iv, p, rng);
        return Row{{fmt(s.time), fmt(s.location), std::to_string(s.n_as)}, s.time, s.location, double(s.n_as)};
      };
      return execute(job, c_bm, out, err);
    }
    if (*diff) {
      const Interval iv = i_diff.interval();
      const SeriesParams p = c_diff.params();
      const double x = i_diff.x;
      auto make_spec = [&]() -> DriftSpec {
        if (drift == "zero") {
          if (rho && *rho != 0.0) throw InvalidArgument("the zero drift has rho = 0");
          return zero_drift(iv, gamma_plus);
        }
        if (drift == "sin") return sin_drift(iv, rho, gamma_plus);
        if (drift == "ou") return ou_drift(mu0, iv, rho, gamma_plus);
        if (expr.empty()) throw InvalidArgument("--drift expr needs --expr");
        return expr_drift(expr, iv, rho, gamma_plus);
      };
      const DriftSpec spec = make_spec();
      if (algo == "det" && spec.rho() > 0.0 && !tilted)
        throw RhoNotZero("drift needs rho = " + std::to_string(spec.rho()) +
                         " > 0; use --algo gdet (exact law) or --tilted (exp(-rho tau)-tilted law)");
      if (kappa && (!(*kappa > 0.0) || !std::isfinite(*kappa))) throw InvalidArgument("--kappa must be positive");
      const double cap = kappa ? *kappa : default_kappa(spec);
      json cfg{{"x", x},          {"a", iv.a()},           {"b", iv.b()},         {"drift", spec.label()},
               {"algo", algo},    {"rho", spec.rho()},     {"gamma_plus", spec.gamma_plus()},
               {"delta", spec.delta()}, {"tilted", tilted}};
      if (drift == "ou") cfg["mu0"] = mu0;
      if (algo != "det") cfg["kappa"] = cap;
      Job job{"diffusion-exit", {"sample_index", "time", "location", "n_tot", "n_it", "capped"}, "time", "n_tot", iv,
              cfg, nullptr};
      job.draw = [&](std::size_t, RngStream& rng) {
        DiffusionExitSample s;
        if (algo == "det") s = sample_det(spec, x, p, rng, tilted);
        else if (algo == "kdet") s = sample_kdet(spec, x, cap, p, rng);
        else s = sample_gdet(spec, x, cap, p, rng);
        return Row{{fmt(s.time), fmt(s.location), std::to_string(s.n_tot), std::to_string(s.n_it), s.capped ? "1" : "0"},
                   s.time,
                   s.location,
                   double(s.n_tot)};
      };
      return execute(job, c_diff, out, err);
    }
    if (*val) {
      const std::vector<std::string> names =
          suite == "all" ? std::vector<std::string>{"brownian", "sin", "ou"} : std::vector<std::string>{suite};
      bool ok = true;
      json all = json::array();
      for (const auto& name : names) {
        const SuiteReport r = run_suite(name, sopts);
        out << r.table();
        ok = ok && r.passed();
        all.push_back(json::parse(r.to_json()));
      }
      if (!report.empty()) {
        std::ofstream f(report, std::ios::binary);
        if (!f) throw InvalidArgument("cannot open '" + report + "' for writing");
        f << (names.size() == 1 ? all[0] : all).dump(2) << '\n';
      }
      return ok ? 0 : 2;
    }
  } catch (const AbortMaxTerms& e) {
    err << "aborted: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace exitwise
