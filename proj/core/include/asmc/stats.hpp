#pragma once

#include <cstddef>
#include <span>

namespace asmc {

/// Welford running mean and variance.
class RunningStats {
 public:
  void push(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  // sample variance (n - 1 denominator); 0 for fewer than two samples
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double stddev() const noexcept;
  double standard_error() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool overlaps(const Interval& other) const noexcept {
    return lo <= other.hi && other.lo <= hi;
  }
};

inline constexpr double kNormalQuantile975 = 1.959963984540054;

/// mean +/- 1.96 standard errors.
Interval normal_ci95(const RunningStats& stats) noexcept;

RunningStats summarize(std::span<const double> values) noexcept;

double median(std::span<const double> values);

}  // namespace asmc
