#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace twostage {

/// Purposes for the independent substreams of one Monte-Carlo run. The numeric
/// values are part of the reproducibility contract and are echoed in manifests.
enum class StreamPurpose : std::uint64_t {
  reward_noise = 1,
  prior_init = 2,
  tie_break = 3,
};

inline constexpr std::string_view kGeneratorName = "splitmix64-counter+box-muller";

/// Counter-based random stream: the i-th 64-bit output is a pure function of
/// (key, i), so streams can be split per (run, purpose) without coordination
/// and any position can be evaluated directly.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t run_index,
                             StreamPurpose purpose) noexcept;

  std::uint64_t next_u64() noexcept { return at(key_, counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Standard normal; consumes two outputs (Box-Muller, cosine branch).
  double normal() noexcept;

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t at(std::uint64_t key, std::uint64_t i) noexcept;

  /// The standard normal that normal() would return after i previous normals
  /// on a fresh stream with this key.
  static double normal_at(std::uint64_t key, std::uint64_t i) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace twostage
