// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pyramid/pyramid.hpp"
#include "test_support.hpp"

using namespace pyramid;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  [[nodiscard]] Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

Outcome tetrahedron_constants() {
  Check c;
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      worst = std::max(worst, std::abs(distance(Tetrahedron::vertex(i), Tetrahedron::vertex(j)) - 2 * kSqrt2));
  c.require(worst <= 1e-12, "edge length error " + num(worst));
  const double dv = std::abs(Tetrahedron::volume() - 8.0 / 3.0);
  c.require(dv <= 1e-12, "volume error " + num(dv));
  c.note("max edge error " + num(worst) + ", volume error " + num(dv));
  return c.result();
}

Outcome volume_ratios() {
  Check c;
  constexpr std::uint64_t n = 10'000'000;
  const HierarchyCounts counts = sample_hierarchy(n, 20260101);
  const double sl = static_cast<double>(counts.sl) / n, q = static_cast<double>(counts.q) / n;
  const double ns = static_cast<double>(counts.ns) / n;
  const double q_ref = kPi * kPi / 16;
  c.require(std::abs(sl - 1.0 / 3.0) <= 0.002, "SL fraction " + num(sl));
  c.require(std::abs(q - q_ref) <= 0.002, "Q fraction " + num(q));
  c.require(counts.ns == n, "NS hits " + std::to_string(counts.ns) + " of " + std::to_string(n));
  c.require(counts.nesting_violations == 0, "nesting violations " + std::to_string(counts.nesting_violations));
  c.note("SL " + num(sl) + " (1/3), Q " + num(q) + " (" + num(q_ref) + "), NS " + num(ns) + ", n=1e7");
  return c.result();
}

Outcome frustration_example() {
  Check c;
  const double h = 1 / kSqrt2;
  const RegionMembership m = classify({h, h, 0.0});
  c.require(m.in_sl == Membership::kOutside, "SL membership " + std::string(to_string(m.in_sl)));
  c.require(m.in_q == Membership::kBoundary, "Q membership " + std::string(to_string(m.in_q)));
  const auto range = sl_z_range(h, h);
  c.require(range.has_value(), "no SL range at X=Y=1/sqrt2");
  if (range) {
    c.require(std::abs(range->first - (kSqrt2 - 1)) <= 1e-12, "min Z " + num(range->first, 17));
    c.require(std::abs(range->first - 0.414) < 0.0005, "min Z does not round to 0.414");
    // The boundary Z itself is SL, anything below is not.
    c.require(in_closed(sl_membership({h, h, range->first}).first), "min Z not in closed SL");
    c.require(!in_closed(sl_membership({h, h, range->first - 1e-6}).first), "Z below min still SL");
    c.note("min Z " + num(range->first, 8));
  }
  return c.result();
}

Outcome quantum_surface() {
  Check c;
  support::Gen gen(404);
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const PhotonPairModel m{gen.uniform(-kPi, kPi), gen.uniform(-kPi, kPi), gen.uniform(-kPi, kPi)};
    const MomentPoint p = photon_moments(m);
    const double x = p.x(), y = p.y(), z = p.z();
    worst = std::max(worst, std::abs(1 + 2 * x * y * z - x * x - y * y - z * z));
  }
  c.require(worst <= 1e-12, "max |det G| " + num(worst));
  c.note("max |det G| " + num(worst));
  return c.result();
}

Outcome oracle_equivalence() {
  Check c;
  support::Gen gen(505);
  constexpr double band = 1e-9;
  int sl_disagree = 0, q_disagree = 0, skipped = 0;
  for (int i = 0; i < 100'000; ++i) {
    const MomentPoint p = gen.point(1.1);
    const double x = p.x(), y = p.y(), z = p.z();
    const std::array<double, 3> squared{(1 + z) * (1 + z) - (x + y) * (x + y), (1 - x) * (1 - x) - (y - z) * (y - z),
                                        (1 - z) * (1 - z) - (x - y) * (x - y)};
    const auto [sl, bc] = sl_membership(p);
    const bool sl_near = sl == Membership::kBoundary ||
                         std::any_of(squared.begin(), squared.end(), [&](double s) { return std::abs(s) <= band; });
    if (sl_near) {
      ++skipped;
    } else {
      const bool oracle = std::all_of(squared.begin(), squared.end(), [](double s) { return s >= 0; });
      sl_disagree += oracle != in_closed(sl);
    }
    const double eig = support::gram_min_eigenvalue(p);
    const auto [q, det] = q_membership(p);
    if (q == Membership::kBoundary || std::abs(eig) <= band) {
      ++skipped;
    } else {
      q_disagree += (eig >= 0) != in_closed(q);
    }
  }
  c.require(sl_disagree == 0, std::to_string(sl_disagree) + " SL disagreements");
  c.require(q_disagree == 0, std::to_string(q_disagree) + " Q disagreements");
  c.note("0 disagreements over 1e5 points (" + std::to_string(skipped) + " band exclusions)");
  return c.result();
}

Outcome realization_round_trip() {
  Check c;
  support::Gen gen(606);
  double worst = 0.0;
  int count_mismatch = 0;
  for (int i = 0; i < 10'000; ++i) {
    // Support size 1..4 selects vertex, edge, face or interior placement.
    const int support_size = 1 + i % 4;
    std::array<int, 4> order{0, 1, 2, 3};
    std::shuffle(order.begin(), order.end(), gen.engine());
    const auto w = gen.simplex(static_cast<std::size_t>(support_size));
    BarycentricCoords bc{};
    for (int k = 0; k < support_size; ++k) bc.xi[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = w[static_cast<std::size_t>(k)];
    const MomentPoint p = point_of(bc);
    const LocalHiddenVariableModel m = realize_sl_point(p);
    worst = std::max(worst, distance(moments_of_lhv(m), p));
    count_mismatch += static_cast<int>(m.size()) != support_size;
  }
  c.require(worst <= 1e-12, "max moment error " + num(worst));
  c.require(count_mismatch == 0, std::to_string(count_mismatch) + " lambda-count mismatches");
  c.note("max moment error " + num(worst) + ", lambda counts match placement");
  return c.result();
}

Outcome lhv_image() {
  Check c;
  support::Gen gen(707);
  int outside = 0, n1 = 0;
  double worst_n1 = 0.0, min_product = 1.0;
  for (int i = 0; i < 100'000; ++i) {
    const LocalHiddenVariableModel m = gen.lhv(8);
    const MomentPoint p = moments_of_lhv(m);
    outside += !in_closed(sl_membership(p).first);
    if (m.size() == 1) {
      ++n1;
      const SiteMeans& s = m.responses()[0];
      const double abc = s.alpha * s.beta * s.gamma;
      const double xyz = p.x() * p.y() * p.z();
      worst_n1 = std::max(worst_n1, std::abs(xyz - abc * abc));
      min_product = std::min(min_product, xyz);
    }
  }
  c.require(outside == 0, std::to_string(outside) + " models outside the tetrahedron");
  c.require(n1 > 0, "no single-value models drawn");
  c.require(worst_n1 <= 1e-12, "max |xyz - (abc)^2| " + num(worst_n1));
  c.require(min_product >= -1e-12, "negative xyz " + num(min_product));
  c.note("1e5 models inside; " + std::to_string(n1) + " single-value models, max |xyz-(abc)^2| " + num(worst_n1));
  return c.result();
}

Outcome behavior_pipeline() {
  Check c;
  support::Gen gen(808);
  int invalid = 0, asymmetric = 0, signalling = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Behavior b = behavior_of_lhv(gen.lhv(8));
    invalid += !validate(b).valid;
    asymmetric += !check_exchange_symmetry(b).symmetric;
    signalling += !check_no_signalling(b).no_signalling;
  }
  c.require(invalid == 0, std::to_string(invalid) + " invalid behaviors");
  c.require(asymmetric == 0, std::to_string(asymmetric) + " asymmetric behaviors");
  c.require(signalling == 0, std::to_string(signalling) + " signalling behaviors");
  // Rounding in (1 +- M)/4 bounds the round-trip at a few ulp.
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const MomentPoint p = gen.point(1.0);
    worst = std::max(worst, distance(reduce_to_moment_point(ns_behavior_from_point(p)), p));
  }
  c.require(worst <= 1e-15, "NS round-trip error " + num(worst));
  c.note("1e4 models valid/symmetric/no-signalling; NS round-trip max error " + num(worst));
  return c.result();
}

Outcome statistical_estimation() {
  Check c;
  const PhotonPairModel model{0, kPi / 4, kPi / 8};
  const std::array<double, 3> truth{0.0, 1 / kSqrt2, 1 / kSqrt2};
  auto covered = [&](const MomentEstimate& e) {
    const std::array<double, 3> est{e.point.x(), e.point.y(), e.point.z()};
    for (std::size_t k = 0; k < 3; ++k)
      if (std::abs(est[k] - truth[k]) > 4 * e.stderrs[k]) return false;
    return true;
  };
  {
    const auto events = sample_events(model, 1'000'000, 1);
    const RunClassification r = classify_run(events);
    c.require(covered(r.estimate), "seed 1 estimate outside 4 standard errors");
    c.require(r.membership.in_sl == Membership::kOutside, "seed 1 not classified SL-outside");
  }
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    hits += covered(estimate_moments(sample_events(model, 1'000'000, seed)));
  }
  c.require(hits >= 99, "coverage " + std::to_string(hits) + "/100");
  c.note("SL-outside; 4-sigma coverage " + std::to_string(hits) + "/100 at 1e6 events");
  return c.result();
}

Outcome chsh_baseline() {
  Check c;
  const double pr = chsh::value({1, 1, 1, -1});
  c.require(pr == 4.0, "PR box S = " + num(pr, 17));
  const double h = 1 / kSqrt2;
  const double ts = chsh::value({h, h, h, -h});
  c.require(std::abs(ts - 2 * kSqrt2) <= 1e-12, "Tsirelson S = " + num(ts, 17));
  const auto r = chsh::occupancy_ratios();
  auto three = [](double v, double want) { return std::abs(std::round(v * 1000) / 1000 - want) < 1e-9; };
  c.require(three(r.pyramid_sl, 0.333), "pyramid SL ratio " + num(r.pyramid_sl));
  c.require(three(r.chsh_sl, 0.5), "CHSH SL ratio " + num(r.chsh_sl));
  c.require(three(r.pyramid_q, 0.617), "pyramid Q ratio " + num(r.pyramid_q));
  c.require(three(r.chsh_q, 0.707), "CHSH Q ratio " + num(r.chsh_q));
  c.note("S(PR)=4, S(Tsirelson)=" + num(ts, 12) + ", ratios " + num(r.pyramid_sl, 3) + "/" + num(r.chsh_sl, 3) + " and " +
         num(r.pyramid_q, 3) + "/" + num(r.chsh_q, 3));
  return c.result();
}

Outcome dimension_count() {
  Check c;
  support::Gen gen(1111);
  // Random symmetric behavior: an LHV mixture with random marginals.
  const Behavior b = behavior_of_lhv(gen.lhv(6));
  const ConstraintSystem cs = symmetric_behavior_constraints();
  const auto flat = b.flat();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(cs.rows.size()), 36);
  double residual = 0.0;
  for (std::size_t r = 0; r < cs.rows.size(); ++r) {
    double lhs = 0.0;
    for (std::size_t k = 0; k < 36; ++k) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = cs.rows[r][k];
      lhs += cs.rows[r][k] * flat[k];
    }
    residual = std::max(residual, std::abs(lhs - cs.rhs[r]));
  }
  c.require(residual <= 1e-12, "random behavior violates the constraints by " + num(residual));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  const auto rank = lu.rank();
  const auto free = 36 - rank;
  c.require(free == 15, "free parameters " + std::to_string(free));
  c.require(free == dimensions::kOffDiagonalSymmetric + dimensions::kDiagonalSymmetric, "9 + 6 decomposition");
  // Moving along the kernel keeps the behavior in the constraint set.
  const Eigen::MatrixXd kernel = lu.kernel();
  c.require(kernel.cols() == 15, "kernel dimension " + std::to_string(kernel.cols()));
  Eigen::VectorXd v(36);
  for (std::size_t k = 0; k < 36; ++k) v(static_cast<Eigen::Index>(k)) = flat[k];
  const Eigen::VectorXd moved = v + 1e-3 * kernel * Eigen::VectorXd::Ones(kernel.cols());
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(cs.rhs.size()));
  for (std::size_t r = 0; r < cs.rhs.size(); ++r) rhs(static_cast<Eigen::Index>(r)) = cs.rhs[r];
  c.require((a * moved - rhs).cwiseAbs().maxCoeff() <= 1e-12, "kernel direction leaves the constraint set");
  c.note("rank " + std::to_string(rank) + " of 36 gives " + std::to_string(free) + " free parameters; facets " +
         std::to_string(dimensions::kLocalPolytopeFacets) + " = 36+72+576 recorded");
  return c.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"tetrahedron constants", tetrahedron_constants},
      {"volume ratios", volume_ratios},
      {"frustration example", frustration_example},
      {"quantum surface identity", quantum_surface},
      {"membership oracle equivalence", oracle_equivalence},
      {"SL realization round-trip", realization_round_trip},
      {"LHV image property", lhv_image},
      {"behavior pipeline", behavior_pipeline},
      {"statistical estimation", statistical_estimation},
      {"CHSH baseline", chsh_baseline},
      {"dimension count", dimension_count},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
