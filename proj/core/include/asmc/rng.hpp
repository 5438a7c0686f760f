#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace asmc {

// A replicate's random stream is identified by (master_seed, stream_id).
// Both words form the Philox key, so distinct stream ids give distinct
// counter-based sequences with no overlap.
struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngStreamSpec&, const RngStreamSpec&) = default;
};

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
///
/// Block k of the output is philox(counter = k, key); each block yields four
/// 64-bit words, consumed in order. The block function is bit-compatible with
/// Random123 and numpy.random.Philox.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  explicit Philox4x64(Key key, Counter counter = {}) noexcept
      : key_(key), counter_(counter) {}

  static Counter block(Counter counter, Key key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  const Counter& counter() const noexcept { return counter_; }
  const Key& key() const noexcept { return key_; }

 private:
  void refill() noexcept;

  Key key_;
  Counter counter_;
  Counter buffer_{};
  int pos_ = 4;
};

/// The random stream handed to models and the engine. Satisfies
/// std::uniform_random_bit_generator, plus the few distributions the library
/// needs implemented here so sequences do not depend on the standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngStreamSpec spec) noexcept
      : spec_(spec), engine_(Philox4x64::Key{spec.master_seed, spec.stream_id}) {}

  static constexpr result_type min() noexcept { return Philox4x64::min(); }
  static constexpr result_type max() noexcept { return Philox4x64::max(); }
  result_type operator()() noexcept { return engine_(); }

  // 53-bit uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // 53-bit uniform on (0, 1].
  double uniform_pos() noexcept {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }
  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() noexcept;

  // Uniform integer on [0, n) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept;

  const RngStreamSpec& spec() const noexcept { return spec_; }

 private:
  RngStreamSpec spec_;
  Philox4x64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace asmc
