#include "asmc/multinomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asmc/error.hpp"

namespace asmc {

std::size_t inverse_cdf(std::span<const double> cumulative, double target) noexcept {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto k = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(k, cumulative.size() - 1);
}

void MultinomialSampler::draw(std::span<const double> weights, std::span<Index> out,
                              Rng& rng) {
  const std::size_t n = weights.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "multinomial_draw: no weights");

  cumulative_.resize(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(weights[k] >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "multinomial_draw: weight " + std::to_string(k) +
                      " is negative or NaN");
    }
    total += weights[k];
    cumulative_[k] = total;
  }
  if (!std::isfinite(total) || total <= 0.0) {
    throw Error(ErrorCode::DegenerateWeights,
                "multinomial_draw: weight sum is not a finite positive number");
  }

  const std::size_t count = out.size();
  if (count == 0) return;
  uniforms_.resize(count);
  for (auto& u : uniforms_) u = rng.uniform();

  // counting sort into `count` equal-width buckets
  bucket_start_.assign(count + 1, 0);
  const auto bucket_of = [count](double u) {
    return std::min(static_cast<std::size_t>(u * static_cast<double>(count)), count - 1);
  };
  for (double u : uniforms_) ++bucket_start_[bucket_of(u) + 1];
  for (std::size_t b = 0; b < count; ++b) bucket_start_[b + 1] += bucket_start_[b];
  order_.resize(count);
  {
    std::vector<std::uint32_t>& fill = bucket_start_;
    for (std::size_t i = 0; i < count; ++i) {
      order_[fill[bucket_of(uniforms_[i])]++] = static_cast<std::uint32_t>(i);
    }
    // undo the shift introduced by filling
    for (std::size_t b = count; b > 0; --b) fill[b] = fill[b - 1];
    fill[0] = 0;
  }
  for (std::size_t b = 0; b < count; ++b) {
    const auto first = order_.begin() + bucket_start_[b];
    const auto last = order_.begin() + bucket_start_[b + 1];
    if (last - first > 1) {
      std::sort(first, last, [this](std::uint32_t a, std::uint32_t c) {
        return uniforms_[a] < uniforms_[c];
      });
    }
  }

  std::size_t k = 0;
  for (std::uint32_t slot : order_) {
    const double target = uniforms_[slot] * total;
    while (k + 1 < n && cumulative_[k] <= target) ++k;
    out[slot] = static_cast<Index>(k);
  }
}

std::vector<Index> multinomial_draw(std::span<const double> weights,
                                    std::size_t count, Rng& rng) {
  std::vector<Index> out(count);
  MultinomialSampler sampler;
  sampler.draw(weights, out, rng);
  return out;
}

}  // namespace asmc
