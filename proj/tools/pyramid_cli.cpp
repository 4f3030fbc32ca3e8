// Command-line front end for the pyramid toolkit.
//
//   pyramid classify      --point X Y Z | --behavior FILE | --events FILE
//   pyramid realize       --point X Y Z [--out MODEL]
//   pyramid volume        [--region SL|Q|NS|all] [--samples N] [--seed S]
//   pyramid sample        --model FILE | --photon T0 T1 T2 | --behavior FILE [--samples N] [--seed S] [--out EVENTS]
//   pyramid estimate      --events FILE | <sample source flags>
//   pyramid scan-quantum  [--steps N] [--vary-theta0]
//   pyramid compare
//
// classify exits 0 for SL, 10 for Q\SL, 20 for NS\Q, 30 outside NS; every
// command exits 2 on input errors.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pyramid/pyramid.hpp"

namespace {

using nlohmann::json;
using namespace pyramid;

constexpr int kInputError = 2;
constexpr std::uint64_t kDefaultSeed = 12345;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::string format = "human";
  std::string out;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"human", "structured"}));
  cmd->add_option("--out", o.out, "Write the report to PATH instead of stdout");
}

json report_header(std::string_view command) {
  return {{"format", "pyramid-report"}, {"version", 1}, {"command", command}};
}

/// JSON has no infinities; they are written as strings.
json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

template <std::size_t N>
json array_of(const std::array<double, N>& a) {
  json j = json::array();
  for (double v : a) j.push_back(number_or_string(v));
  return j;
}

void emit(const OutputOptions& o, const std::string& human, const json& structured) {
  const std::string text = o.format == "structured" ? structured.dump(2) + "\n" : human;
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError("cannot open output file " + o.out);
  f << text;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path);
  return f;
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt_point(const MomentPoint& p) {
  return "(" + fmt(p.x()) + ", " + fmt(p.y()) + ", " + fmt(p.z()) + ")";
}

template <std::size_t N>
std::string fmt_array(const std::array<double, N>& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < N; ++i) s += (i ? ", " : "") + fmt(a[i]);
  return s + ")";
}

int exit_code_for(Region r) {
  switch (r) {
    case Region::kStronglyLocal: return 0;
    case Region::kQuantum: return 10;
    case Region::kNoSignalling: return 20;
    case Region::kOutside: return 30;
  }
  return kInputError;
}

json membership_json(const RegionMembership& m, const MomentPoint& p) {
  return {{"point", {p.x(), p.y(), p.z()}},
          {"region", to_string(innermost_region(m))},
          {"membership", {{"sl", to_string(m.in_sl)}, {"q", to_string(m.in_q)}, {"ns", to_string(m.in_ns)}}},
          {"barycentric", array_of(m.barycentric.xi)},
          {"facet_margins", array_of(m.barycentric.xi)},
          {"pyramid_inequalities", array_of(pyramid_inequalities(p))},
          {"gram_det", m.gram_det},
          {"tolerance", m.tolerance_used}};
}

std::string membership_text(const RegionMembership& m, const MomentPoint& p) {
  std::ostringstream os;
  os << "point            " << fmt_point(p) << "\n"
     << "region           " << to_string(innermost_region(m)) << "\n"
     << "strongly local   " << to_string(m.in_sl) << "\n"
     << "quantum          " << to_string(m.in_q) << "\n"
     << "no-signalling    " << to_string(m.in_ns) << "\n"
     << "barycentric      " << fmt_array(m.barycentric.xi) << "\n"
     << "pyramid ineqs    " << fmt_array(pyramid_inequalities(p)) << "\n"
     << "det G            " << fmt(m.gram_det) << "\n"
     << "tolerance        " << fmt(m.tolerance_used) << "\n";
  return os.str();
}

// ---- sources shared by sample / estimate ----

struct SourceOptions {
  std::string model;
  std::string behavior;
  std::vector<double> photon;
  std::uint64_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  bool all_settings = false;
  std::size_t threads = 0;
};

void add_source_options(CLI::App* cmd, SourceOptions& s, bool required) {
  auto* g = cmd->add_option_group("source", "Event source");
  g->add_option("--model", s.model, "LHV model file");
  g->add_option("--behavior", s.behavior, "Behavior file");
  g->add_option("--photon", s.photon, "Photon-pair polariser angles theta0 theta1 theta2 (radians)")->expected(3);
  if (required) {
    g->require_option(1);
  } else {
    g->require_option(0, 1);
  }
  cmd->add_option("--samples", s.samples, "Number of events")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", s.seed, "RNG seed");
  cmd->add_flag("--all-settings", s.all_settings, "Draw all nine setting pairs instead of the six off-diagonal ones");
  cmd->add_option("--threads", s.threads, "Worker threads (0 = hardware concurrency)");
}

bool has_source(const SourceOptions& s) { return !s.model.empty() || !s.behavior.empty() || !s.photon.empty(); }

std::pair<EventSource, std::string> load_source(const SourceOptions& s) {
  if (!s.model.empty()) {
    auto f = open_input(s.model);
    return {io::read_lhv(f), "lhv model " + s.model};
  }
  if (!s.behavior.empty()) {
    auto f = open_input(s.behavior);
    return {io::read_behavior(f), "behavior " + s.behavior};
  }
  const PhotonPairModel m{s.photon.at(0), s.photon.at(1), s.photon.at(2)};
  return {m, "photon pair theta=(" + fmt(m.theta0, 17) + ", " + fmt(m.theta1, 17) + ", " + fmt(m.theta2, 17) + ")"};
}

std::vector<EventRecord> draw(const SourceOptions& s, std::string& description) {
  auto [source, desc] = load_source(s);
  const SettingPolicy policy = s.all_settings ? SettingPolicy::all_pairs_uniform() : SettingPolicy::off_diagonal_uniform();
  description = desc + " seed=" + std::to_string(s.seed) + " n=" + std::to_string(s.samples);
  return sample_events(source, policy, s.samples, s.seed, s.threads);
}

// ---- commands ----

struct ClassifyOptions {
  std::vector<double> point;
  std::string behavior;
  std::string events;
  double tol = kDefaultTolerance;
  double alpha = 0.05;
  OutputOptions out;
};

json run_estimate_json(const RunClassification& r) {
  json j = membership_json(r.membership, r.estimate.point);
  j["estimate"] = {{"counts", r.estimate.counts}, {"stderr", r.estimate.stderrs}};
  j["z_scores"] = {{"facets", array_of(r.facet_z)},
                   {"facet_stderr", r.facet_stderr},
                   {"gram_det", number_or_string(r.gram_det_z)},
                   {"gram_det_stderr", r.gram_det_stderr}};
  j["alpha"] = r.alpha;
  j["critical_z"] = r.critical_z;
  return j;
}

std::string run_estimate_text(const RunClassification& r) {
  std::ostringstream os;
  os << membership_text(r.membership, r.estimate.point);
  os << "events per class (" << r.estimate.counts[0] << ", " << r.estimate.counts[1] << ", " << r.estimate.counts[2]
     << ")\n"
     << "stderr           " << fmt_array(r.estimate.stderrs) << "\n"
     << "facet z-scores   " << fmt_array(r.facet_z) << "\n"
     << "det G z-score    " << fmt(r.gram_det_z) << "\n"
     << "critical z       " << fmt(r.critical_z) << " (alpha " << fmt(r.alpha) << ")\n";
  return os.str();
}

int cmd_classify(const ClassifyOptions& o) {
  json j = report_header("classify");
  std::string human;
  RegionMembership m;
  if (!o.point.empty()) {
    const MomentPoint p{o.point[0], o.point[1], o.point[2]};
    m = classify(p, o.tol);
    j["input"] = {{"kind", "point"}};
    j.update(membership_json(m, p));
    human = membership_text(m, p);
  } else if (!o.behavior.empty()) {
    auto f = open_input(o.behavior);
    const Behavior b = io::read_behavior(f);
    const ValidationReport v = validate(b, o.tol);
    if (!v.valid) {
      std::string msg = "behavior is not a valid probability table:";
      for (const auto& issue : v.issues) {
        msg += " [" + std::to_string(issue.q1) + "," + std::to_string(issue.q2) + "] " + issue.what + ";";
      }
      throw InputError(msg);
    }
    const SymmetryReport sym = check_exchange_symmetry(b, o.tol);
    const SignallingReport ns = check_no_signalling(b, o.tol);
    const MomentPoint p = reduce_to_moment_point(b, o.tol);
    m = classify(p, o.tol);
    j["input"] = {{"kind", "behavior"}, {"path", o.behavior}};
    j.update(membership_json(m, p));
    j["behavior_checks"] = {{"exchange_symmetric", sym.symmetric},
                            {"symmetry_residual", sym.max_residual},
                            {"no_signalling", ns.no_signalling},
                            {"max_marginal_deviation", ns.max_deviation}};
    human = membership_text(m, p) + "exchange symmetric " + (sym.symmetric ? "yes" : "no") + " (residual " +
            fmt(sym.max_residual) + ")\nno-signalling    " + (ns.no_signalling ? "yes" : "no") + " (deviation " +
            fmt(ns.max_deviation) + ")\n";
  } else {
    auto f = open_input(o.events);
    const io::EventFile ev = io::read_events(f);
    const RunClassification r = classify_run(ev.events, o.tol, o.alpha);
    m = r.membership;
    j["input"] = {{"kind", "events"}, {"path", o.events}, {"source", ev.source}, {"events", ev.events.size()}};
    j.update(run_estimate_json(r));
    human = run_estimate_text(r);
  }
  const int code = exit_code_for(innermost_region(m));
  j["exit_code"] = code;
  emit(o.out, human, j);
  return code;
}

int cmd_realize(const std::vector<double>& point, double tol, const std::string& out) {
  const MomentPoint p{point[0], point[1], point[2]};
  const auto [membership, bc] = sl_membership(p, tol);
  if (membership == Membership::kOutside) {
    std::cerr << "error: point " << fmt_point(p) << " lies outside the strongly-local tetrahedron; facet margins "
              << fmt_array(bc.xi) << "\n";
    return kInputError;
  }
  const LocalHiddenVariableModel model = realize_sl_point(p, tol);
  if (out.empty()) {
    io::write_lhv(std::cout, model);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InputError("cannot open output file " + out);
    io::write_lhv(f, model);
    std::cerr << "wrote " << model.size() << "-value hidden-variable model to " << out << "\n";
  }
  return 0;
}

struct VolumeOptions {
  std::string region = "all";
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 0;
  bool timing = false;
  OutputOptions out;
};

int cmd_volume(const VolumeOptions& o) {
  std::vector<VolumeRegion> regions;
  if (o.region == "all") {
    regions = {VolumeRegion::kSL, VolumeRegion::kQ, VolumeRegion::kNS};
  } else {
    try {
      regions = {parse_volume_region(o.region)};
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const HierarchyCounts counts = sample_hierarchy(o.samples, o.seed, o.threads);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json j = report_header("volume");
  j["seed"] = o.seed;
  j["samples"] = o.samples;
  j["estimates"] = json::array();
  std::ostringstream human;
  human << "seed " << o.seed << ", " << o.samples << " samples in [-1,1]^3\n";
  human << std::left << std::setw(8) << "region" << std::setw(14) << "fraction" << std::setw(14) << "stderr"
        << std::setw(14) << "volume" << std::setw(14) << "reference" << "\n";
  for (VolumeRegion r : regions) {
    const std::uint64_t hits = r == VolumeRegion::kSL ? counts.sl : (r == VolumeRegion::kQ ? counts.q : counts.ns);
    const VolumeEstimate e = make_estimate(r, o.samples, hits, o.seed);
    j["estimates"].push_back({{"region", to_string(r)},
                              {"samples", e.samples},
                              {"hits", e.hits},
                              {"fraction", e.fraction},
                              {"stderr", e.stderr_},
                              {"absolute_volume", e.absolute_volume},
                              {"reference_fraction", reference::fraction(r)},
                              {"reference_volume", reference::fraction(r) * Tetrahedron::kCubeVolume},
                              {"seed", e.seed}});
    human << std::setw(8) << to_string(r) << std::setw(14) << fmt(e.fraction, 8) << std::setw(14)
          << fmt(e.stderr_, 3) << std::setw(14) << fmt(e.absolute_volume, 8) << std::setw(14)
          << fmt(reference::fraction(r), 8) << "\n";
  }
  if (o.timing) j["wall_time_s"] = seconds;
  human << "wall time " << fmt(seconds, 3) << " s\n";
  emit(o.out, human.str(), j);
  return 0;
}

int cmd_sample(const SourceOptions& s, const std::string& out) {
  std::string description;
  const auto events = draw(s, description);
  if (out.empty()) {
    io::write_events(std::cout, events, description);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InputError("cannot open output file " + out);
    io::write_events(f, events, description);
    std::cerr << "wrote " << events.size() << " events to " << out << " (seed " << s.seed << ")\n";
  }
  return 0;
}

int cmd_estimate(const SourceOptions& s, const std::string& events_path, double tol, double alpha,
                 const OutputOptions& out) {
  std::vector<EventRecord> events;
  json input;
  if (!events_path.empty()) {
    auto f = open_input(events_path);
    io::EventFile ev = io::read_events(f);
    events = std::move(ev.events);
    input = {{"kind", "events"}, {"path", events_path}, {"source", ev.source}};
  } else {
    std::string description;
    events = draw(s, description);
    input = {{"kind", "simulated"}, {"source", description}, {"seed", s.seed}};
  }
  input["events"] = events.size();
  const RunClassification r = classify_run(events, tol, alpha);
  json j = report_header("estimate");
  j["input"] = input;
  j.update(run_estimate_json(r));
  std::string human = "source           " + input["source"].get<std::string>() + "\n" + run_estimate_text(r);
  emit(out, human, j);
  return 0;
}

int cmd_scan_quantum(int steps, bool vary_theta0, double tol, const OutputOptions& out) {
  if (steps < 1) throw InputError("--steps must be >= 1");
  const double step = std::numbers::pi / steps;
  json rows = json::array();
  std::ostringstream human;
  human << "# theta0 theta1 theta2 X Y Z detG xi1 xi2 xi3 xi4 sl_violated\n";
  std::size_t violated = 0, total = 0;
  const int first_limit = vary_theta0 ? steps : 1;
  for (int i = 0; i < first_limit; ++i) {
    for (int k = 0; k < steps; ++k) {
      for (int l = 0; l < steps; ++l) {
        const PhotonPairModel m{i * step, k * step, l * step};
        const MomentPoint p = photon_moments(m);
        const double det = GramMatrix(p).determinant();
        const auto xi = tetrahedron_facet_margins(p);
        const bool bad = *std::min_element(xi.begin(), xi.end()) < -0.25 * tol;
        violated += bad;
        ++total;
        rows.push_back({{"theta", {m.theta0, m.theta1, m.theta2}},
                        {"point", {p.x(), p.y(), p.z()}},
                        {"gram_det", det},
                        {"facet_margins", array_of(xi)},
                        {"sl_violated", bad}});
        human << fmt(m.theta0, 12) << ' ' << fmt(m.theta1, 12) << ' ' << fmt(m.theta2, 12) << ' ' << fmt(p.x(), 12)
              << ' ' << fmt(p.y(), 12) << ' ' << fmt(p.z(), 12) << ' ' << fmt(det, 3) << ' ' << fmt(xi[0], 12) << ' '
              << fmt(xi[1], 12) << ' ' << fmt(xi[2], 12) << ' ' << fmt(xi[3], 12) << ' ' << (bad ? 1 : 0) << "\n";
      }
    }
  }
  human << "# " << violated << " of " << total << " rows violate the pyramid inequalities\n";
  json j = report_header("scan-quantum");
  j["steps"] = steps;
  j["vary_theta0"] = vary_theta0;
  j["tolerance"] = tol;
  j["rows"] = rows;
  j["violating_rows"] = violated;
  emit(out, human.str(), j);
  return 0;
}

int cmd_compare(const OutputOptions& out) {
  const auto r = chsh::occupancy_ratios();
  json j = report_header("compare");
  j["pyramid"] = {{"sl_fraction", r.pyramid_sl},
                  {"q_fraction", r.pyramid_q},
                  {"beyond_quantum_fraction", r.pyramid_beyond_quantum()}};
  j["chsh"] = {{"sl_fraction", r.chsh_sl},
               {"q_fraction", r.chsh_q},
               {"beyond_quantum_fraction", r.chsh_beyond_quantum()},
               {"bounds", {chsh::kLocalBound, chsh::kTsirelsonBound, chsh::kAlgebraicBound}}};
  std::ostringstream human;
  human << std::left << std::setw(22) << "fraction of NS" << std::setw(12) << "pyramid" << "CHSH\n"
        << std::setw(22) << "SL" << std::setw(12) << fmt(r.pyramid_sl, 5) << fmt(r.chsh_sl, 5) << "\n"
        << std::setw(22) << "Q" << std::setw(12) << fmt(r.pyramid_q, 5) << fmt(r.chsh_q, 5) << "\n"
        << std::setw(22) << "beyond quantum" << std::setw(12) << fmt(r.pyramid_beyond_quantum(), 5)
        << fmt(r.chsh_beyond_quantum(), 5) << "\n";
  emit(out, human.str(), j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strongly-local / quantum / no-signalling geometry for the symmetric (3,3,2,2) Bell scenario"};
  app.require_subcommand(1);

  ClassifyOptions classify_opts;
  auto* classify_cmd = app.add_subcommand("classify", "Classify a point, behavior file or event file");
  {
    auto* g = classify_cmd->add_option_group("input", "Exactly one input source");
    g->add_option("--point", classify_opts.point, "Moment point X Y Z")->expected(3)->allow_extra_args(false);
    g->add_option("--behavior", classify_opts.behavior, "Behavior file");
    g->add_option("--events", classify_opts.events, "Event file");
    g->require_option(1);
    classify_cmd->add_option("--tol", classify_opts.tol, "Absolute tolerance")->check(CLI::NonNegativeNumber);
    classify_cmd->add_option("--alpha", classify_opts.alpha, "Significance level for event-file z-scores");
    add_output_options(classify_cmd, classify_opts.out);
  }

  std::vector<double> realize_point;
  double realize_tol = kDefaultTolerance;
  std::string realize_out;
  auto* realize_cmd = app.add_subcommand("realize", "Write a hidden-variable model reproducing an SL point");
  realize_cmd->add_option("--point", realize_point, "Moment point X Y Z")->expected(3)->required();
  realize_cmd->add_option("--tol", realize_tol, "Absolute tolerance")->check(CLI::NonNegativeNumber);
  realize_cmd->add_option("--out", realize_out, "Model file (default stdout)");

  VolumeOptions volume_opts;
  auto* volume_cmd = app.add_subcommand("volume", "Monte Carlo volume fractions of SL, Q and NS");
  volume_cmd->add_option("--region", volume_opts.region, "SL, Q, NS or all");
  volume_cmd->add_option("--samples", volume_opts.samples, "Sample count")->check(CLI::PositiveNumber);
  volume_cmd->add_option("--seed", volume_opts.seed, "RNG seed");
  volume_cmd->add_option("--threads", volume_opts.threads, "Worker threads (0 = hardware concurrency)");
  volume_cmd->add_flag("--timing", volume_opts.timing, "Include wall time in structured output");
  add_output_options(volume_cmd, volume_opts.out);

  SourceOptions sample_opts;
  std::string sample_out;
  auto* sample_cmd = app.add_subcommand("sample", "Simulate an event file from a model");
  add_source_options(sample_cmd, sample_opts, true);
  sample_cmd->add_option("--out", sample_out, "Event file (default stdout)");

  SourceOptions estimate_opts;
  std::string estimate_events;
  double estimate_tol = kDefaultTolerance, estimate_alpha = 0.05;
  OutputOptions estimate_out;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the moment point of an event file or a simulated run");
  add_source_options(estimate_cmd, estimate_opts, false);
  estimate_cmd->add_option("--events", estimate_events, "Event file");
  estimate_cmd->add_option("--tol", estimate_tol, "Absolute tolerance")->check(CLI::NonNegativeNumber);
  estimate_cmd->add_option("--alpha", estimate_alpha, "Significance level for z-scores");
  add_output_options(estimate_cmd, estimate_out);

  int scan_steps = 8;
  bool scan_vary = false;
  double scan_tol = kDefaultTolerance;
  OutputOptions scan_out;
  auto* scan_cmd = app.add_subcommand("scan-quantum", "Tabulate photon-pair moments over an angle grid k*pi/steps");
  scan_cmd->add_option("--steps", scan_steps, "Grid points per angle over [0, pi)");
  scan_cmd->add_flag("--vary-theta0", scan_vary, "Also vary theta0 (default fixes theta0 = 0)");
  scan_cmd->add_option("--tol", scan_tol, "Absolute tolerance")->check(CLI::NonNegativeNumber);
  add_output_options(scan_cmd, scan_out);

  OutputOptions compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Pyramid vs CHSH occupancy ratios");
  add_output_options(compare_cmd, compare_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*classify_cmd) return cmd_classify(classify_opts);
    if (*realize_cmd) return cmd_realize(realize_point, realize_tol, realize_out);
    if (*volume_cmd) return cmd_volume(volume_opts);
    if (*sample_cmd) return cmd_sample(sample_opts, sample_out);
    if (*estimate_cmd) {
      if (estimate_events.empty() == !has_source(estimate_opts)) {
        throw InputError("estimate needs exactly one of --events, --model, --behavior, --photon");
      }
      return cmd_estimate(estimate_opts, estimate_events, estimate_tol, estimate_alpha, estimate_out);
    }
    if (*scan_cmd) return cmd_scan_quantum(scan_steps, scan_vary, scan_tol, scan_out);
    if (*compare_cmd) return cmd_compare(compare_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
