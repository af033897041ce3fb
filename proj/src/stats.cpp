#include "varw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "varw/errors.hpp"

namespace varw {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

double chi_square_sf(double stat, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (!(stat > 0.0)) return 1.0;
  return boost::math::gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

ChiSquareResult contingency_chi_square(const std::vector<std::vector<double>>& table) {
  ChiSquareResult out;
  if (table.empty()) return out;
  const std::size_t cols = table.front().size();
  std::vector<double> row_total(table.size(), 0.0);
  std::vector<double> col_total(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table[r].size() != cols) throw std::invalid_argument("ragged contingency table");
    for (std::size_t c = 0; c < cols; ++c) {
      row_total[r] += table[r][c];
      col_total[c] += table[r][c];
      total += table[r][c];
    }
  }
  std::size_t used_rows = 0;
  for (double t : row_total) used_rows += t > 0.0 ? 1 : 0;
  std::size_t used_cols = 0;
  for (std::size_t c = 0; c < cols; ++c) {
    if (col_total[c] <= 0.0) continue;
    ++used_cols;
    for (std::size_t r = 0; r < table.size(); ++r) {
      if (row_total[r] <= 0.0) continue;
      const double expected = row_total[r] * col_total[c] / total;
      const double d = table[r][c] - expected;
      out.statistic += d * d / expected;
    }
  }
  out.bins = used_cols;
  out.dof = (used_rows > 1 && used_cols > 1) ? (used_rows - 1) * (used_cols - 1) : 0;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

ChiSquareResult two_sample_chi_square(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b, double min_expected) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double total = na + nb;
  // A pooled bin of column total c expects c * n_k / total in sample k, so
  // even the single all-values bin needs min(n_a, n_b) >= min_expected.
  if (std::min(na, nb) < min_expected) {
    throw ModelError("two-sample chi-square: not enough samples to pool bins");
  }

  std::map<std::int64_t, std::pair<double, double>> counts;
  for (std::int64_t v : a) counts[v].first += 1.0;
  for (std::int64_t v : b) counts[v].second += 1.0;

  std::vector<double> row_a;
  std::vector<double> row_b;
  double acc_a = 0.0;
  double acc_b = 0.0;
  const double needed = min_expected * total / std::min(na, nb);
  for (const auto& [value, c] : counts) {
    acc_a += c.first;
    acc_b += c.second;
    if (acc_a + acc_b >= needed) {
      row_a.push_back(acc_a);
      row_b.push_back(acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (row_a.empty()) {
      row_a.push_back(0.0);
      row_b.push_back(0.0);
    }
    row_a.back() += acc_a;
    row_b.back() += acc_b;
  }
  return contingency_chi_square({row_a, row_b});
}

}  // namespace varw
