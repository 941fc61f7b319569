#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace dca {

// Seed mixer used to derive per-run seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Single-stream deterministic generator. mt19937_64's output sequence is
// pinned by the C++ standard, but the standard distributions and std::sample
// are not; everything downstream of the raw engine is hand-rolled here so a
// seed reproduces the same run on every platform and standard library.
class SampleRng {
 public:
  using engine_type = std::mt19937_64;

  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on {0, ..., n-1}, bias-free via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t rem =
        (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;  // 2^64 mod n
    const std::uint64_t threshold = 0 - rem;                      // 2^64 - rem, mod 2^64
    for (;;) {
      const std::uint64_t x = engine_();
      if (rem == 0 || x < threshold) return x % n;
    }
  }

  // k distinct indices from {0, ..., n-1}: the first k entries of a partial
  // Fisher-Yates shuffle. With k == n this is a full random permutation.
  std::vector<std::size_t> sample_indices(std::size_t k, std::size_t n) {
    if (k > n) throw std::invalid_argument("sample_indices: k exceeds n");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace dca
