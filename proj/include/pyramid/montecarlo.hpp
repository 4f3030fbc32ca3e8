#pragma once

// Uniform-sampling volume estimates for the SL, Q and NS regions inside the
// cube [-1,1]^3. Boundary points count as inside.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pyramid/errors.hpp"
#include "pyramid/geometry.hpp"
#include "pyramid/random.hpp"

namespace pyramid {

enum class VolumeRegion { kSL, kQ, kNS };

inline std::string_view to_string(VolumeRegion r) {
  switch (r) {
    case VolumeRegion::kSL: return "SL";
    case VolumeRegion::kQ: return "Q";
    case VolumeRegion::kNS: return "NS";
  }
  return "?";
}

inline VolumeRegion parse_volume_region(std::string_view s) {
  if (s == "SL" || s == "sl") return VolumeRegion::kSL;
  if (s == "Q" || s == "q") return VolumeRegion::kQ;
  if (s == "NS" || s == "ns") return VolumeRegion::kNS;
  throw DomainError("unknown region '" + std::string(s) + "' (expected SL, Q or NS)");
}

/// Reference fractions of the cube.
namespace reference {
inline constexpr double kSLFraction = 1.0 / 3.0;
inline constexpr double kQFraction = std::numbers::pi * std::numbers::pi / 16.0;
inline constexpr double kNSFraction = 1.0;
inline constexpr double kSLVolume = 8.0 / 3.0;
inline constexpr double kQVolume = std::numbers::pi * std::numbers::pi / 2.0;
inline constexpr double kNSVolume = 8.0;

inline double fraction(VolumeRegion r) {
  switch (r) {
    case VolumeRegion::kSL: return kSLFraction;
    case VolumeRegion::kQ: return kQFraction;
    case VolumeRegion::kNS: return kNSFraction;
  }
  return 0.0;
}
}  // namespace reference

struct VolumeEstimate {
  VolumeRegion region = VolumeRegion::kNS;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double fraction = 0.0;
  double stderr_ = 0.0;
  double absolute_volume = 0.0;
  std::uint64_t seed = 0;
};

inline double binomial_stderr(double fraction, std::uint64_t samples) {
  return std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(samples));
}

struct HierarchyCounts {
  std::uint64_t samples = 0;
  std::uint64_t sl = 0;
  std::uint64_t q = 0;
  std::uint64_t ns = 0;
  /// Sampled points that broke SL within Q within NS. Always zero for a correct classifier.
  std::uint64_t nesting_violations = 0;
};

/// Classifies `samples` uniform cube points. Chunk k uses substream (seed, k).
inline HierarchyCounts sample_hierarchy(std::uint64_t samples, std::uint64_t seed, std::size_t threads = 0,
                                        double tol = kDefaultTolerance) {
  if (samples < 1) throw DomainError("samples must be >= 1");
  const std::size_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<HierarchyCounts> per_chunk(chunks);
  for_each_chunk(samples, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Stream rng(seed, chunk);
    HierarchyCounts c;
    for (std::size_t i = begin; i < end; ++i) {
      const double x = rng.uniform(-1.0, 1.0);
      const double y = rng.uniform(-1.0, 1.0);
      const double z = rng.uniform(-1.0, 1.0);
      const RegionMembership m = classify(MomentPoint{x, y, z}, tol);
      const bool sl = in_closed(m.in_sl), q = in_closed(m.in_q), ns = in_closed(m.in_ns);
      c.sl += sl;
      c.q += q;
      c.ns += ns;
      c.nesting_violations += (sl && !q) || (q && !ns);
    }
    c.samples = end - begin;
    per_chunk[chunk] = c;
  });
  HierarchyCounts total;
  for (const auto& c : per_chunk) {
    total.samples += c.samples;
    total.sl += c.sl;
    total.q += c.q;
    total.ns += c.ns;
    total.nesting_violations += c.nesting_violations;
  }
  return total;
}

inline VolumeEstimate make_estimate(VolumeRegion region, std::uint64_t samples, std::uint64_t hits,
                                    std::uint64_t seed) {
  VolumeEstimate e;
  e.region = region;
  e.samples = samples;
  e.hits = hits;
  e.fraction = static_cast<double>(hits) / static_cast<double>(samples);
  e.stderr_ = binomial_stderr(e.fraction, samples);
  e.absolute_volume = e.fraction * Tetrahedron::kCubeVolume;
  e.seed = seed;
  return e;
}

inline VolumeEstimate estimate_volume(VolumeRegion region, std::uint64_t samples, std::uint64_t seed,
                                      std::size_t threads = 0) {
  const HierarchyCounts c = sample_hierarchy(samples, seed, threads);
  std::uint64_t hits = c.ns;
  if (region == VolumeRegion::kSL) hits = c.sl;
  if (region == VolumeRegion::kQ) hits = c.q;
  return make_estimate(region, samples, hits, seed);
}

struct HierarchyBreakdown {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double sl = 0.0;
  double q_minus_sl = 0.0;
  double ns_minus_q = 0.0;
  double q = 0.0;
  std::uint64_t nesting_violations = 0;

  [[nodiscard]] double stderr_of(double fraction) const { return binomial_stderr(fraction, samples); }
};

inline HierarchyBreakdown hierarchy_breakdown(std::uint64_t samples, std::uint64_t seed, std::size_t threads = 0) {
  const HierarchyCounts c = sample_hierarchy(samples, seed, threads);
  const double n = static_cast<double>(c.samples);
  HierarchyBreakdown b;
  b.samples = c.samples;
  b.seed = seed;
  b.sl = static_cast<double>(c.sl) / n;
  b.q = static_cast<double>(c.q) / n;
  b.q_minus_sl = static_cast<double>(c.q - c.sl) / n;
  b.ns_minus_q = static_cast<double>(c.ns - c.q) / n;
  b.nesting_violations = c.nesting_violations;
  return b;
}

}  // namespace pyramid
