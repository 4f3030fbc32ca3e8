#pragma once

// Reproducible substreams. Work is cut into fixed-size chunks; chunk k of a
// run seeded with s always draws from the engine seeded by
// substream_seed(s, k), so results do not depend on how chunks are spread
// over threads.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace pyramid {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t v) noexcept {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : engine_(substream_seed(seed, stream)) {}

  /// Uniform on [0, 1) with 53 random bits; the conversion is fixed here
  /// rather than left to std::uniform_real_distribution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Index drawn from a cumulative table whose last entry is 1.
  std::size_t pick(const std::vector<double>& cumulative) {
    const double u = uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

inline std::size_t default_threads() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls body(chunk_index, begin, end) for every chunk of [0, total),
/// distributing chunks round-robin over up to `threads` workers.
inline void for_each_chunk(std::size_t total, std::size_t threads,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t chunks = (total + kChunkSize - 1) / kChunkSize;
  if (threads == 0) threads = default_threads();
  threads = std::min(threads, std::max<std::size_t>(chunks, 1));
  auto worker = [&](std::size_t w) {
    for (std::size_t c = w; c < chunks; c += threads) {
      const std::size_t begin = c * kChunkSize;
      body(c, begin, std::min(total, begin + kChunkSize));
    }
  };
  if (threads <= 1) {
    worker(0);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          worker(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Cumulative sums of weights, last entry forced to exactly 1.
inline std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> c(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    c[i] = acc;
  }
  if (!c.empty()) {
    for (double& v : c) v /= acc;
    c.back() = 1.0;
  }
  return c;
}

}  // namespace pyramid
