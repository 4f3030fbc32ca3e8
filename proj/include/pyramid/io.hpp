#pragma once

// File formats:
//   behavior  JSON {"version":1, "scenario":"3322", "blocks":{"q1,q2":[p++, p+-, p-+, p--], ...}}
//   lhv       JSON {"version":1, "kind":"lhv", "weights":[...], "responses":[[alpha,beta,gamma], ...]}
//   events    text, header "# pyramid-events v1 source: <text>", then one "q1 q2 a1 a2" record per line

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pyramid/behavior.hpp"
#include "pyramid/errors.hpp"
#include "pyramid/models.hpp"
#include "pyramid/sampler.hpp"

namespace pyramid::io {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kScenario = "3322";
inline constexpr std::string_view kEventsMagic = "# pyramid-events v1";

inline std::string block_key(int q1, int q2) { return std::to_string(q1) + "," + std::to_string(q2); }

namespace detail {

inline void require_version(const nlohmann::json& j, std::string_view what) {
  if (!j.is_object()) throw StructuralError(std::string(what) + ": document must be a JSON object");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kFormatVersion) {
    throw StructuralError(std::string(what) + ": unsupported or missing version (expected 1)");
  }
}

inline nlohmann::json parse(std::istream& in, std::string_view what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

inline double number(const nlohmann::json& j, std::string_view what) {
  if (!j.is_number()) throw StructuralError(std::string(what) + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::json behavior_to_json(const Behavior& b) {
  nlohmann::json blocks = nlohmann::json::object();
  for (int q1 = 0; q1 < kSettings; ++q1)
    for (int q2 = 0; q2 < kSettings; ++q2) {
      const Block& blk = b.block(q1, q2);
      blocks[block_key(q1, q2)] = std::vector<double>(blk.begin(), blk.end());
    }
  return {{"version", kFormatVersion},
          {"scenario", kScenario},
          {"outcome_order", {"++", "+-", "-+", "--"}},
          {"blocks", blocks}};
}

inline Behavior behavior_from_json(const nlohmann::json& j) {
  detail::require_version(j, "behavior");
  if (!j.contains("scenario") || j["scenario"] != kScenario) {
    throw StructuralError("behavior: scenario must be \"3322\"");
  }
  if (!j.contains("blocks") || !j["blocks"].is_object()) throw StructuralError("behavior: missing \"blocks\" object");
  const auto& blocks = j["blocks"];
  Behavior b;
  for (int q1 = 0; q1 < kSettings; ++q1) {
    for (int q2 = 0; q2 < kSettings; ++q2) {
      const std::string key = block_key(q1, q2);
      if (!blocks.contains(key)) throw StructuralError("behavior: missing setting pair \"" + key + "\"");
      const auto& arr = blocks[key];
      if (!arr.is_array() || arr.size() != 4) {
        throw StructuralError("behavior: block \"" + key + "\" must hold four probabilities");
      }
      for (std::size_t o = 0; o < 4; ++o) b.block(q1, q2)[o] = detail::number(arr[o], "behavior block " + key);
    }
  }
  if (blocks.size() != 9) throw StructuralError("behavior: unexpected keys in \"blocks\"");
  return b;
}

inline nlohmann::json lhv_to_json(const LocalHiddenVariableModel& m) {
  nlohmann::json responses = nlohmann::json::array();
  for (const auto& r : m.responses()) responses.push_back({r.alpha, r.beta, r.gamma});
  return {{"version", kFormatVersion}, {"kind", "lhv"}, {"weights", m.weights()}, {"responses", responses}};
}

/// Weights must sum to 1 within 1e-9; they are then rescaled exactly.
inline LocalHiddenVariableModel lhv_from_json(const nlohmann::json& j) {
  detail::require_version(j, "lhv");
  if (!j.contains("kind") || j["kind"] != "lhv") throw StructuralError("lhv: kind must be \"lhv\"");
  if (!j.contains("weights") || !j["weights"].is_array()) throw StructuralError("lhv: missing \"weights\" array");
  if (!j.contains("responses") || !j["responses"].is_array()) {
    throw StructuralError("lhv: missing \"responses\" array");
  }
  std::vector<double> weights;
  for (const auto& w : j["weights"]) weights.push_back(detail::number(w, "lhv weight"));
  std::vector<SiteMeans> responses;
  for (const auto& r : j["responses"]) {
    if (!r.is_array() || r.size() != 3) throw StructuralError("lhv: each response must be [alpha, beta, gamma]");
    responses.push_back({detail::number(r[0], "lhv response"), detail::number(r[1], "lhv response"),
                         detail::number(r[2], "lhv response")});
  }
  return {std::move(weights), std::move(responses), 1e-9};
}

inline Behavior read_behavior(std::istream& in) { return behavior_from_json(detail::parse(in, "behavior")); }
inline LocalHiddenVariableModel read_lhv(std::istream& in) { return lhv_from_json(detail::parse(in, "lhv")); }

inline void write_behavior(std::ostream& out, const Behavior& b) { out << behavior_to_json(b).dump(2) << '\n'; }
inline void write_lhv(std::ostream& out, const LocalHiddenVariableModel& m) { out << lhv_to_json(m).dump(2) << '\n'; }

inline void write_events(std::ostream& out, std::span<const EventRecord> events, std::string_view source) {
  std::string src(source);
  for (char& c : src) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  out << kEventsMagic << " source: " << src << '\n';
  std::string line;
  for (const auto& e : events) {
    line.clear();
    line += std::to_string(e.q1);
    line += ' ';
    line += std::to_string(e.q2);
    line += ' ';
    line += std::to_string(e.a1);
    line += ' ';
    line += std::to_string(e.a2);
    line += '\n';
    out << line;
  }
}

struct EventFile {
  std::string source;
  std::vector<EventRecord> events;
};

namespace detail {

inline int parse_int(std::string_view tok, std::size_t line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw StructuralError("events line " + std::to_string(line_no) + ": not an integer: '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace detail

/// Rejects a missing header, wrong field counts, and out-of-range labels.
inline EventFile read_events(std::istream& in) {
  EventFile file;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kEventsMagic)) {
    throw StructuralError("events: missing header '" + std::string(kEventsMagic) + "'");
  }
  const auto pos = line.find("source:");
  if (pos != std::string::npos) {
    file.source = line.substr(pos + 7);
    if (!file.source.empty() && file.source.front() == ' ') file.source.erase(0, 1);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string_view> tokens;
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(" \t");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto stop = rest.find_first_of(" \t");
      tokens.push_back(rest.substr(0, stop));
      rest.remove_prefix(stop == std::string_view::npos ? rest.size() : stop);
    }
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    if (tokens.size() != 4) {
      throw StructuralError("events line " + std::to_string(line_no) + ": expected four fields 'q1 q2 a1 a2'");
    }
    const int q1 = detail::parse_int(tokens[0], line_no), q2 = detail::parse_int(tokens[1], line_no);
    const int a1 = detail::parse_int(tokens[2], line_no), a2 = detail::parse_int(tokens[3], line_no);
    const bool ok = q1 >= 0 && q1 < kSettings && q2 >= 0 && q2 < kSettings && (a1 == 1 || a1 == -1) &&
                    (a2 == 1 || a2 == -1);
    if (!ok) throw StructuralError("events line " + std::to_string(line_no) + ": label out of range");
    file.events.push_back({static_cast<std::int8_t>(q1), static_cast<std::int8_t>(q2), static_cast<std::int8_t>(a1),
                           static_cast<std::int8_t>(a2)});
  }
  return file;
}

}  // namespace pyramid::io
