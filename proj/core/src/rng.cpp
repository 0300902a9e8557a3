#include "twostage/rng.hpp"

#include <cmath>
#include <numbers>

namespace twostage {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

double box_muller(std::uint64_t a, std::uint64_t b) noexcept {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((a >> 11) + 1) * kInv53;
  const double u2 = static_cast<double>(b >> 11) * kInv53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t run_index,
                                  StreamPurpose purpose) noexcept {
  std::uint64_t k = mix64(master_seed + kGolden);
  k = mix64(k ^ (run_index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0xAEF17502108EF2D9ULL));
  return RandomStream(k);
}

std::uint64_t RandomStream::at(std::uint64_t key, std::uint64_t i) noexcept {
  return mix64(key + (i + 1) * kGolden);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * kInv53;
}

double RandomStream::normal() noexcept {
  const std::uint64_t a = next_u64();
  const std::uint64_t b = next_u64();
  return box_muller(a, b);
}

double RandomStream::normal_at(std::uint64_t key, std::uint64_t i) noexcept {
  return box_muller(at(key, 2 * i), at(key, 2 * i + 1));
}

std::size_t RandomStream::index(std::size_t n) noexcept {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return static_cast<std::size_t>(x % bound);
}

}  // namespace twostage
