#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "asmc/rng.hpp"

namespace asmc {

using Index = std::uint32_t;

/// Smallest k with target < cumulative[k], clamped to the last index.
/// `cumulative` is an inclusive prefix sum of nonnegative weights.
std::size_t inverse_cdf(std::span<const double> cumulative, double target) noexcept;

/// I.i.d. categorical draws with P(k) = weights[k] / sum(weights).
///
/// One uniform is consumed per draw, in slot order, and mapped through the
/// inverse CDF. The uniforms are bucket-sorted so the CDF is walked once:
/// O(N + count) expected instead of O(count log N) binary searches. The result
/// is identical to per-draw binary search on the same uniforms.
class MultinomialSampler {
 public:
  void draw(std::span<const double> weights, std::span<Index> out, Rng& rng);

 private:
  std::vector<double> cumulative_;
  std::vector<double> uniforms_;
  std::vector<std::uint32_t> bucket_start_;
  std::vector<std::uint32_t> order_;
};

std::vector<Index> multinomial_draw(std::span<const double> weights,
                                    std::size_t count, Rng& rng);

}  // namespace asmc
