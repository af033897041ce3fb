#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace varw {

/// Quantile of a sorted sample with linear interpolation between order
/// statistics (p in [0, 1]).
double quantile_sorted(std::span<const double> sorted, double p);

double median(std::vector<double> values);

/// Upper tail P(X >= stat) of a chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double stat, std::size_t dof);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Pearson test of homogeneity for an r x c table of counts (rows = samples).
/// Columns with a zero total are ignored.
ChiSquareResult contingency_chi_square(const std::vector<std::vector<double>>& table);

/// Two-sample chi-square on integer-valued samples. Adjacent values are
/// pooled in ascending order until every bin has expected count >= min_expected
/// in both samples. Throws ModelError when either sample is too small to form
/// a single such bin.
ChiSquareResult two_sample_chi_square(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b,
                                      double min_expected = 5.0);

}  // namespace varw
