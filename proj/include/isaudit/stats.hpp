/*
 * Copyright 2026 The isaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Categorical statistics kernel: distributions over ordered attribute lists,
// Wasserstein-1 transport distance, Pearson chi-square independence test and
// sample correlation. Everything here is pure and reentrant.

#ifndef ISAUDIT_STATS_HPP_
#define ISAUDIT_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isaudit/error.hpp"

namespace isaudit {

// How distances between the categories of one axis are measured.
//  - kOrdinal: categories sit at index positions 0..k-1 on a line.
//  - kNominal: every pair of distinct categories is one unit apart.
enum class MetricKind { kOrdinal, kNominal };

// Integer counts aligned to an axis's attribute order.
struct CountVector {
  std::vector<std::int64_t> counts;

  std::size_t size() const { return counts.size(); }
  std::int64_t total() const {
    std::int64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }
  bool operator==(const CountVector&) const = default;
};

// Probability vector aligned to the attribute order of `axis`.
struct CategoricalDist {
  std::string axis;
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  bool operator==(const CategoricalDist&) const = default;
};

inline constexpr double kDistributionTolerance = 1e-12;

// Throws kInvalidArgument unless every entry is in [0,1] and the entries sum
// to one within `tolerance`.
inline void CheckDistribution(const CategoricalDist& dist,
                              double tolerance = kDistributionTolerance) {
  if (dist.probs.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "distribution over '" + dist.axis + "' is empty");
  }
  double sum = 0.0;
  for (double p : dist.probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "probability outside [0,1] in distribution over '" +
                      dist.axis + "'");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw Error(ErrorKind::kInvalidArgument,
                "distribution over '" + dist.axis + "' sums to " +
                    std::to_string(sum));
  }
}

inline CategoricalDist normalize(const CountVector& counts,
                                 std::string axis = {}) {
  for (auto c : counts.counts) {
    if (c < 0) {
      throw Error(ErrorKind::kInvalidArgument, "negative count");
    }
  }
  const std::int64_t total = counts.total();
  if (total == 0) {
    throw Error(ErrorKind::kEmptyCounts,
                "cannot normalize an all-zero count vector" +
                    (axis.empty() ? std::string() : " for axis '" + axis + "'"));
  }
  CategoricalDist dist{std::move(axis), {}};
  dist.probs.reserve(counts.size());
  const double denom = static_cast<double>(total);
  for (auto c : counts.counts) {
    dist.probs.push_back(static_cast<double>(c) / denom);
  }
  return dist;
}

inline CategoricalDist uniform_distribution(std::size_t k,
                                            std::string axis = {}) {
  if (k == 0) {
    throw Error(ErrorKind::kInvalidArgument, "uniform over zero categories");
  }
  return CategoricalDist{std::move(axis),
                         std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

// Wasserstein-1 (earth mover) distance between two distributions over the
// same axis.
//
// Ordinal axes place category i at position i, or at i/(k-1) when
// `normalize_support` is set; the optimal transport cost on a line is the L1
// distance between the two CDFs. Nominal axes use unit cost between distinct
// categories, where the optimum is the total variation distance.
inline double wasserstein1(const CategoricalDist& d1, const CategoricalDist& d2,
                           MetricKind metric, bool normalize_support = false) {
  if (d1.size() != d2.size() ||
      (!d1.axis.empty() && !d2.axis.empty() && d1.axis != d2.axis)) {
    throw Error(ErrorKind::kAxisMismatch,
                "distributions over '" + d1.axis + "' (" +
                    std::to_string(d1.size()) + ") and '" + d2.axis + "' (" +
                    std::to_string(d2.size()) + ") are not comparable");
  }
  const std::size_t k = d1.size();
  if (k == 0) return 0.0;

  if (metric == MetricKind::kNominal) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::abs(d1.probs[i] - d2.probs[i]);
    return 0.5 * sum;
  }

  const double spacing =
      (normalize_support && k > 1) ? 1.0 / static_cast<double>(k - 1) : 1.0;
  double cdf1 = 0.0;
  double cdf2 = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    cdf1 += d1.probs[i];
    cdf2 += d2.probs[i];
    sum += std::abs(cdf1 - cdf2);
  }
  return sum * spacing;
}

namespace detail {

inline constexpr int kGammaMaxIterations = 200;
inline constexpr double kGammaEpsilon = 1e-14;

// log(x^a e^-x / Gamma(a)), the common prefactor of both expansions.
inline double GammaLogPrefactor(double a, double x) {
  return a * std::log(x) - x - std::lgamma(a);
}

// Lower regularized P(a,x) by its power series; used for x < a + 1.
inline double GammaSeriesP(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kGammaMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEpsilon) break;
  }
  return sum * std::exp(GammaLogPrefactor(a, x));
}

// Upper regularized Q(a,x) by the Legendre continued fraction evaluated with
// the modified Lentz method; used for x >= a + 1.
inline double GammaContinuedFractionQ(double a, double x) {
  constexpr double kTiny = std::numeric_limits<double>::min() / kGammaEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEpsilon) break;
  }
  return std::exp(GammaLogPrefactor(a, x)) * h;
}

}  // namespace detail

// Regularized upper incomplete gamma function Q(a, x) = Gamma(a, x) / Gamma(a).
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "regularized_gamma_q needs a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    return std::clamp(1.0 - detail::GammaSeriesP(a, x), 0.0, 1.0);
  }
  return std::clamp(detail::GammaContinuedFractionQ(a, x), 0.0, 1.0);
}

// Survival function of the chi-square distribution.
inline double chi_square_sf(double statistic, int df) {
  if (df <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "chi-square df must be positive");
  }
  return regularized_gamma_q(0.5 * df, 0.5 * statistic);
}

// Rows are the counterfactual attributes of the intervened axis, columns the
// attributes of the target axis.
struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::int64_t>> cells;

  std::size_t rows() const { return cells.size(); }
  std::size_t cols() const { return col_labels.size(); }
  bool operator==(const ContingencyTable&) const = default;
};

inline void CheckContingency(const ContingencyTable& table) {
  if (table.cells.size() != table.row_labels.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "contingency row count does not match its labels");
  }
  for (const auto& row : table.cells) {
    if (row.size() != table.col_labels.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "contingency column count does not match its labels");
    }
    for (auto v : row) {
      if (v < 0) {
        throw Error(ErrorKind::kInvalidArgument, "negative contingency cell");
      }
    }
  }
}

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Pearson chi-square test of independence without continuity correction.
// All-zero rows and columns are dropped first. Returns nullopt when fewer than
// two rows or two columns remain: such a table carries no evidence either way.
inline std::optional<ChiSquareResult> chi_square_test(
    const ContingencyTable& table) {
  CheckContingency(table);
  const std::size_t r0 = table.rows();
  const std::size_t c0 = table.cols();

  std::vector<std::int64_t> row_tot(r0, 0);
  std::vector<std::int64_t> col_tot(c0, 0);
  for (std::size_t i = 0; i < r0; ++i) {
    for (std::size_t j = 0; j < c0; ++j) {
      row_tot[i] += table.cells[i][j];
      col_tot[j] += table.cells[i][j];
    }
  }
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < r0; ++i)
    if (row_tot[i] > 0) rows.push_back(i);
  for (std::size_t j = 0; j < c0; ++j)
    if (col_tot[j] > 0) cols.push_back(j);
  if (rows.size() < 2 || cols.size() < 2) return std::nullopt;

  std::int64_t grand = 0;
  for (auto i : rows) grand += row_tot[i];
  const double n = static_cast<double>(grand);

  double statistic = 0.0;
  for (auto i : rows) {
    for (auto j : cols) {
      const double expected =
          static_cast<double>(row_tot[i]) * static_cast<double>(col_tot[j]) / n;
      const double diff = static_cast<double>(table.cells[i][j]) - expected;
      statistic += diff * diff / expected;
    }
  }
  ChiSquareResult result;
  result.statistic = statistic;
  result.df = static_cast<int>((rows.size() - 1) * (cols.size() - 1));
  result.p_value = chi_square_sf(statistic, result.df);
  return result;
}

// Sample Pearson correlation coefficient.
inline double pearson_correlation(std::span<const double> xs,
                                  std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "correlation inputs have lengths " + std::to_string(xs.size()) +
                    " and " + std::to_string(ys.size()));
  }
  if (xs.size() < 2) {
    throw Error(ErrorKind::kLengthMismatch,
                "correlation needs at least two paired values");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::kZeroVariance, "correlation input is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace isaudit

#endif  // ISAUDIT_STATS_HPP_
