#pragma once

#include <cstdint>
#include <cmath>

namespace impactflow {

// ===== Counter-style random streams =====
//
// Every random quantity in the library is drawn from a stream whose seed is a
// pure function of (master seed, path index, step index, lane).  Workers never
// share stream state, so results are bit-reproducible for a fixed master seed
// no matter how work is scheduled across threads.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer: a bijective 64-bit mix with good avalanche behavior.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform pseudo-random stream (SplitMix64 sequence started at `seed`).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept { return mix64(state_ += kGoldenGamma); }

  /// Uniform on the open interval (0,1); never returns 0 or 1, so the result
  /// is always a safe argument for log().
  double next_unit() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller, cosine branch).  Consumes exactly two
  /// uniforms per call, which keeps stream consumption predictable.
  double next_normal() noexcept {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Key identifying one simulated path: hash of (master seed, path index).
inline std::uint64_t path_key(std::uint64_t master_seed, std::uint64_t path_index) noexcept {
  std::uint64_t h = mix64(master_seed + kGoldenGamma);
  h = mix64(h ^ (path_index + 0xD6E8FEB86659FD93ULL));
  return h;
}

/// Stream for one (path, step, lane) cell.  Lanes separate draw kinds within a
/// step (Gaussian vs. jump), so skipping an unused draw never shifts any other
/// draw in the path.
inline RngStream substream(std::uint64_t key, std::uint64_t step, std::uint64_t lane) noexcept {
  return RngStream(mix64(key ^ (step * 0xC2B2AE3D27D4EB4FULL) ^ ((lane + 1) * 0x165667B19E3779F9ULL)));
}

}  // namespace impactflow
