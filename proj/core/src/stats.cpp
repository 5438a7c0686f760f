#include "asmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "asmc/error.hpp"

namespace asmc {

double RunningStats::stddev() const noexcept { return std::sqrt(variance()); }

double RunningStats::standard_error() const noexcept {
  return count_ > 0 ? stddev() / std::sqrt(static_cast<double>(count_)) : 0.0;
}

Interval normal_ci95(const RunningStats& stats) noexcept {
  const double half = kNormalQuantile975 * stats.standard_error();
  return {stats.mean() - half, stats.mean() + half};
}

RunningStats summarize(std::span<const double> values) noexcept {
  RunningStats s;
  for (double v : values) s.push(v);
  return s;
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty range");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace asmc
