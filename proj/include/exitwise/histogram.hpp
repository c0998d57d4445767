#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace exitwise {

struct HistogramBin {
  double left;
  double right;
  std::size_t count;
  double density;  ///< count / (n * width)
};

/// Equal-width bins spanning [min, max] of the samples; the maximum falls in the last bin.
/// A constant sample is centred in a unit-width range. Throws InvalidArgument for bins < 2
/// or empty input.
std::vector<HistogramBin> histogram(const std::vector<double>& samples, std::size_t bins);

/// CSV with header bin_left,bin_right,count,density and 17 significant digits.
std::string histogram_csv(const std::vector<HistogramBin>& bins);

}  // namespace exitwise
