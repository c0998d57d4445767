#include "exitwise/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "exitwise/errors.hpp"

namespace exitwise {

std::vector<HistogramBin> histogram(const std::vector<double>& samples, std::size_t bins) {
  if (bins < 2) throw InvalidArgument("histogram needs at least 2 bins");
  if (samples.empty()) throw InvalidArgument("histogram of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("histogram input is not finite");
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / double(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].left = lo + width * double(i);
    out[i].right = i + 1 == bins ? hi : lo + width * double(i + 1);
    out[i].count = 0;
  }
  for (double v : samples) {
    auto k = std::size_t((v - lo) / width);
    if (k >= bins) k = bins - 1;
    ++out[k].count;
  }
  const double n = double(samples.size());
  for (auto& b : out) b.density = double(b.count) / (n * (b.right - b.left));
  return out;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string s = "bin_left,bin_right,count,density\n";
  char line[128];
  for (const auto& b : bins) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%zu,%.17g\n", b.left, b.right, b.count, b.density);
    s += line;
  }
  return s;
}

}  // namespace exitwise
