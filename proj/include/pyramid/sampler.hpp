#pragma once

// Event-level simulation: draw (q1, q2, a1, a2) records from a source model
// and estimate the moment point with finite-statistics uncertainties.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <sstream>
#include <variant>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "pyramid/behavior.hpp"
#include "pyramid/errors.hpp"
#include "pyramid/geometry.hpp"
#include "pyramid/models.hpp"
#include "pyramid/random.hpp"

namespace pyramid {

struct EventRecord {
  std::int8_t q1 = 0;
  std::int8_t q2 = 0;
  std::int8_t a1 = 1;
  std::int8_t a2 = 1;

  friend constexpr bool operator==(const EventRecord&, const EventRecord&) = default;
};

inline bool is_valid(const EventRecord& e) {
  auto setting_ok = [](int q) { return q >= 0 && q < kSettings; };
  auto outcome_ok = [](int a) { return a == 1 || a == -1; };
  return setting_ok(e.q1) && setting_ok(e.q2) && outcome_ok(e.a1) && outcome_ok(e.a2);
}

/// Probability of each setting pair (q1, q2), independent of the hidden variable.
class SettingPolicy {
 public:
  /// Uniform over the six off-diagonal pairs.
  SettingPolicy() {
    for (int q1 = 0; q1 < kSettings; ++q1)
      for (int q2 = 0; q2 < kSettings; ++q2) weights_[idx(q1, q2)] = q1 == q2 ? 0.0 : 1.0 / 6.0;
  }

  static SettingPolicy off_diagonal_uniform() { return {}; }

  static SettingPolicy all_pairs_uniform() {
    SettingPolicy p;
    p.weights_.fill(1.0 / 9.0);
    return p;
  }

  /// Row-major over (q1, q2). Weights must be non-negative and sum to 1.
  static SettingPolicy from_weights(const std::array<double, 9>& weights, double tol = kDefaultTolerance) {
    double sum = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw DomainError("SettingPolicy: weights must be finite and >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "SettingPolicy: weights sum to " << sum << ", expected 1";
      throw DomainError(os.str());
    }
    SettingPolicy p;
    p.weights_ = weights;
    return p;
  }

  [[nodiscard]] double weight(int q1, int q2) const { return weights_[idx(q1, q2)]; }
  [[nodiscard]] const std::array<double, 9>& weights() const noexcept { return weights_; }

 private:
  static std::size_t idx(int q1, int q2) { return static_cast<std::size_t>(q1 * kSettings + q2); }
  std::array<double, 9> weights_{};
};

using EventSource = std::variant<Behavior, LocalHiddenVariableModel, PhotonPairModel>;

namespace detail {

/// Per-source draw of (a1, a2) given settings.
class OutcomeDrawer {
 public:
  explicit OutcomeDrawer(const EventSource& source) {
    if (const auto* lhv = std::get_if<LocalHiddenVariableModel>(&source)) {
      lhv_ = lhv;
      lambda_cdf_ = cumulative(lhv->weights());
      return;
    }
    const Behavior b = std::holds_alternative<Behavior>(source)
                           ? std::get<Behavior>(source)
                           : photon_behavior(std::get<PhotonPairModel>(source));
    const ValidationReport report = validate(b);
    if (!report.valid) throw DomainError("sample_events: source behavior is not a valid probability table");
    for (int q1 = 0; q1 < kSettings; ++q1) {
      for (int q2 = 0; q2 < kSettings; ++q2) {
        const Block& blk = b.block(q1, q2);
        std::vector<double> w(blk.begin(), blk.end());
        for (double& v : w) v = std::max(v, 0.0);
        block_cdf_[static_cast<std::size_t>(q1 * kSettings + q2)] = cumulative(w);
      }
    }
  }

  void draw(Stream& rng, EventRecord& e) const {
    if (lhv_ != nullptr) {
      // Bell factorisation: one hidden value, then independent local answers.
      const SiteMeans& r = lhv_->responses()[rng.pick(lambda_cdf_)];
      e.a1 = rng.uniform() < 0.5 * (1.0 + r.at(e.q1)) ? 1 : -1;
      e.a2 = rng.uniform() < 0.5 * (1.0 + r.at(e.q2)) ? 1 : -1;
      return;
    }
    const std::size_t o = rng.pick(block_cdf_[static_cast<std::size_t>(e.q1 * kSettings + e.q2)]);
    e.a1 = static_cast<std::int8_t>(kOutcomePairs[o][0]);
    e.a2 = static_cast<std::int8_t>(kOutcomePairs[o][1]);
  }

 private:
  const LocalHiddenVariableModel* lhv_ = nullptr;
  std::vector<double> lambda_cdf_;
  std::array<std::vector<double>, 9> block_cdf_;
};

}  // namespace detail

/// n events; chunk k of the run uses substream (seed, k), so the output is
/// identical for any thread count.
inline std::vector<EventRecord> sample_events(const EventSource& source, const SettingPolicy& policy, std::size_t n,
                                              std::uint64_t seed, std::size_t threads = 0) {
  std::vector<EventRecord> events(n);
  if (n == 0) return events;
  const detail::OutcomeDrawer drawer(source);
  const std::vector<double> setting_cdf =
      cumulative(std::vector<double>(policy.weights().begin(), policy.weights().end()));
  for_each_chunk(n, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Stream rng(seed, chunk);
    for (std::size_t i = begin; i < end; ++i) {
      EventRecord& e = events[i];
      const auto pair = static_cast<int>(rng.pick(setting_cdf));
      e.q1 = static_cast<std::int8_t>(pair / kSettings);
      e.q2 = static_cast<std::int8_t>(pair % kSettings);
      drawer.draw(rng, e);
    }
  });
  return events;
}

inline std::vector<EventRecord> sample_events(const EventSource& source, std::size_t n, std::uint64_t seed,
                                              std::size_t threads = 0) {
  return sample_events(source, SettingPolicy{}, n, seed, threads);
}

/// Off-diagonal classes: 0 -> {01,10} (X), 1 -> {02,20} (Y), 2 -> {12,21} (Z).
/// Returns -1 for diagonal settings.
constexpr int moment_class(int q1, int q2) {
  if (q1 == q2) return -1;
  return q1 + q2 - 1;
}

/// Running (count, sum of a1 a2) per class. Merging is associative and
/// commutative, so any chunking of a record stream gives the same totals.
struct MomentAccumulator {
  std::array<std::uint64_t, 3> counts{};
  std::array<std::int64_t, 3> sums{};

  /// With pool_transposed = false only q1 < q2 records are used.
  void add(const EventRecord& e, bool pool_transposed = true) {
    const int c = moment_class(e.q1, e.q2);
    if (c < 0) return;
    if (!pool_transposed && e.q1 > e.q2) return;
    const auto k = static_cast<std::size_t>(c);
    ++counts[k];
    sums[k] += e.a1 * e.a2;
  }

  void merge(const MomentAccumulator& other) {
    for (std::size_t k = 0; k < 3; ++k) {
      counts[k] += other.counts[k];
      sums[k] += other.sums[k];
    }
  }
};

struct MomentEstimate {
  MomentPoint point;
  std::array<std::uint64_t, 3> counts{};
  std::array<double, 3> stderrs{};
};

inline constexpr std::array<std::string_view, 3> kMomentClassNames{"{(0,1),(1,0)}", "{(0,2),(2,0)}",
                                                                   "{(1,2),(2,1)}"};

inline MomentEstimate finish(const MomentAccumulator& acc) {
  std::array<double, 3> means{};
  MomentEstimate est;
  for (std::size_t k = 0; k < 3; ++k) {
    if (acc.counts[k] == 0) {
      throw InsufficientDataError("estimate_moments: no events in setting class " + std::string(kMomentClassNames[k]));
    }
    const double n = static_cast<double>(acc.counts[k]);
    means[k] = static_cast<double>(acc.sums[k]) / n;
    est.counts[k] = acc.counts[k];
    est.stderrs[k] = std::sqrt(std::max(0.0, 1.0 - means[k] * means[k]) / n);
  }
  est.point = MomentPoint{means[0], means[1], means[2]};
  return est;
}

inline MomentEstimate estimate_moments(std::span<const EventRecord> events, bool pool_transposed = true) {
  MomentAccumulator acc;
  for (const auto& e : events) acc.add(e, pool_transposed);
  return finish(acc);
}

struct RunClassification {
  MomentEstimate estimate;
  RegionMembership membership;
  double alpha = 0.05;
  /// One-sided normal quantile for alpha.
  double critical_z = 0.0;
  std::array<double, 4> facet_margins{};
  double facet_stderr = 0.0;
  std::array<double, 4> facet_z{};
  double gram_det_stderr = 0.0;
  double gram_det_z = 0.0;
};

/// margin / stderr, with a zero stderr mapped to +-infinity (or 0 for a zero margin).
inline double z_score(double margin, double stderr_value) {
  if (stderr_value > 0.0) return margin / stderr_value;
  if (margin == 0.0) return 0.0;
  return margin > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

inline RunClassification classify_run(std::span<const EventRecord> events, double tol = kDefaultTolerance,
                                       double alpha = 0.05) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("classify_run: alpha must lie in (0,1)");
  RunClassification r;
  r.estimate = estimate_moments(events);
  r.membership = classify(r.estimate.point, tol);
  r.alpha = alpha;
  r.critical_z = boost::math::quantile(boost::math::normal_distribution<double>{}, 1.0 - alpha);

  const auto& se = r.estimate.stderrs;
  // Every xi_i is linear in (X, Y, Z) with coefficients +-1/4.
  r.facet_stderr = 0.25 * std::sqrt(se[0] * se[0] + se[1] * se[1] + se[2] * se[2]);
  r.facet_margins = r.membership.barycentric.xi;
  for (std::size_t i = 0; i < 4; ++i) r.facet_z[i] = z_score(r.facet_margins[i], r.facet_stderr);

  const auto grad = GramMatrix(r.estimate.point).determinant_gradient();
  double var = 0.0;
  for (std::size_t k = 0; k < 3; ++k) var += grad[k] * grad[k] * se[k] * se[k];
  r.gram_det_stderr = std::sqrt(var);
  r.gram_det_z = z_score(r.membership.gram_det, r.gram_det_stderr);
  return r;
}

}  // namespace pyramid
