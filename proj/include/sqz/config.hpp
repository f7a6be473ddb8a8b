#pragma once

// Text configuration for simulation runs.
//
// Grammar (one statement per line, '#' starts a comment):
//
//   key.path = number [unit]
//   [chain.element]            starts a new loss element
//   [chain]                    optional, marks the (possibly empty) chain
//
// Top-level keys must precede the first section header. Inside a
// [chain.element] block only name, kind, value and cavity.* are allowed.
// Units: W mW uW | Hz kHz MHz | m km | rad mrad | % (fractions).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/grid.hpp"
#include "sqz/loss_budget.hpp"
#include "sqz/quadrature.hpp"

namespace sqz {

struct SimulationConfig {
  OpoParams opo;
  LossChain chain;
  PhaseNoise phase_noise;
  Grid frequency_grid;  // 10 Hz .. 10 kHz, 200 points, log
  std::optional<Grid> pump_grid;
  /// Evaluation frequency for pump sweeps and budget tables.
  double frequency = 5e3;
  /// Frequencies tabulated by the budget command; defaults to {frequency}.
  std::vector<double> budget_frequencies{5e3};
};

namespace detail::cfg {

enum class Unit { none, power, frequency, length, angle, fraction, count, text };

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Block = std::map<std::string, Entry>;

inline double parse_number(std::string_view text, std::size_t line, const std::string& key) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw ParseError(key + ": not a number: '" + std::string(text) + "'", line);
  return v;
}

inline double scale_for(std::string_view unit, Unit kind, std::size_t line, const std::string& key) {
  struct Row {
    std::string_view name;
    Unit kind;
    double scale;
  };
  static constexpr Row table[] = {
      {"W", Unit::power, 1.0},         {"mW", Unit::power, 1e-3},      {"uW", Unit::power, 1e-6},
      {"Hz", Unit::frequency, 1.0},    {"kHz", Unit::frequency, 1e3},  {"MHz", Unit::frequency, 1e6},
      {"m", Unit::length, 1.0},        {"km", Unit::length, 1e3},      {"rad", Unit::angle, 1.0},
      {"mrad", Unit::angle, 1e-3},     {"%", Unit::fraction, 1e-2},
  };
  if (unit.empty()) return 1.0;
  for (const auto& r : table)
    if (r.name == unit) {
      if (r.kind != kind) break;
      return r.scale;
    }
  throw ParseError(key + ": unit '" + std::string(unit) + "' not allowed here", line);
}

/// Value of `key` in `block` with an optional unit suffix, in SI.
inline std::optional<double> number(const Block& block, const std::string& key, Unit kind,
                                    const std::string& path_prefix = {}) {
  const auto it = block.find(key);
  if (it == block.end()) return std::nullopt;
  const std::string path = path_prefix + key;
  std::string_view text = it->second.value;
  std::string_view unit;
  if (const auto sp = text.find_first_of(" \t"); sp != std::string_view::npos) {
    unit = trim(text.substr(sp));
    text = text.substr(0, sp);
  } else if (!text.empty() && text.back() == '%') {
    unit = "%";
    text.remove_suffix(1);
  }
  const double v = parse_number(text, it->second.line, path);
  return v * scale_for(unit, kind, it->second.line, path);
}

inline std::size_t line_of(const Block& block, const std::string& key) {
  const auto it = block.find(key);
  return it == block.end() ? 0 : it->second.line;
}

inline const std::map<std::string, Unit>& global_keys() {
  static const std::map<std::string, Unit> keys = {
      {"opo.pump_power", Unit::power},
      {"opo.threshold_power", Unit::power},
      {"opo.output_transmission", Unit::fraction},
      {"opo.round_trip_loss", Unit::fraction},
      {"opo.hwhm", Unit::frequency},
      {"phase_noise.rms_angle", Unit::angle},
      {"frequency_grid.start", Unit::frequency},
      {"frequency_grid.stop", Unit::frequency},
      {"frequency_grid.points", Unit::count},
      {"frequency_grid.scale", Unit::text},
      {"pump_grid.start", Unit::power},
      {"pump_grid.stop", Unit::power},
      {"pump_grid.points", Unit::count},
      {"pump_grid.scale", Unit::text},
      {"sweep.frequency", Unit::frequency},
      {"budget.frequencies", Unit::text},
  };
  return keys;
}

inline const std::map<std::string, Unit>& element_keys() {
  static const std::map<std::string, Unit> keys = {
      {"name", Unit::text},
      {"kind", Unit::text},
      {"value", Unit::fraction},
      {"cavity.input_transmission", Unit::fraction},
      {"cavity.end_reflectivity", Unit::fraction},
      {"cavity.round_trip_loss", Unit::fraction},
      {"cavity.round_trip_length", Unit::length},
  };
  return keys;
}

inline std::size_t count(const Block& b, const std::string& key) {
  const auto it = b.find(key);
  if (it == b.end()) return 0;
  const auto& text = it->second.value;
  const double v = parse_number(trim(text), it->second.line, key);
  if (v < 0 || v != std::floor(v) || v > 1e7) throw ParseError(key + ": expected a non-negative integer", it->second.line);
  return static_cast<std::size_t>(v);
}

inline void read_grid(const Block& b, const std::string& prefix, Unit unit, Grid& grid) {
  if (auto v = number(b, prefix + ".start", unit)) grid.start = *v;
  if (auto v = number(b, prefix + ".stop", unit)) grid.stop = *v;
  if (b.count(prefix + ".points")) grid.points = count(b, prefix + ".points");
  if (const auto it = b.find(prefix + ".scale"); it != b.end()) {
    if (it->second.value == "log") grid.scale = GridScale::log;
    else if (it->second.value == "linear") grid.scale = GridScale::linear;
    else throw ParseError(prefix + ".scale: expected 'log' or 'linear'", it->second.line);
  }
  const std::size_t line = line_of(b, prefix + ".start");
  if (grid.points < 2) throw ValidationError(prefix + ".points", "needs at least 2 points", line_of(b, prefix + ".points"));
  if (!(grid.stop > grid.start)) throw ValidationError(prefix + ".stop", "grid must be ascending (stop > start)", line_of(b, prefix + ".stop"));
  if (grid.scale == GridScale::log && !(grid.start > 0.0))
    throw ValidationError(prefix + ".start", "logarithmic grid needs start > 0", line);
  if (!(grid.start >= 0.0)) throw ValidationError(prefix + ".start", "must be >= 0", line);
}

inline LossElement build_element(const Block& b, std::size_t index, std::size_t header_line) {
  const std::string at = "chain.element[" + std::to_string(index) + "].";
  LossElement e;
  e.name = b.count("name") ? b.at("name").value : "element " + std::to_string(index);
  if (!b.count("kind")) throw ValidationError(at + "kind", "missing", header_line);
  const std::string kind = b.at("kind").value;
  const std::size_t kind_line = b.at("kind").line;

  auto require_value = [&]() {
    auto v = number(b, "value", Unit::fraction, at);
    if (!v) throw ValidationError(at + "value", "missing", header_line);
    return *v;
  };
  auto reject = [&](const std::string& key) {
    if (b.count(key)) throw ValidationError(at + key, "not valid for kind '" + kind + "'", line_of(b, key));
  };

  if (kind == "static" || kind == "double_pass") {
    for (const auto& [k, _] : b)
      if (k.starts_with("cavity.")) reject(k);
    const double loss = require_value();
    if (!(loss >= 0.0 && loss < 1.0)) throw ValidationError(at + "value", "loss must lie in [0,1)", line_of(b, "value"));
    if (kind == "static") e.value = StaticLoss{loss};
    else e.value = DoublePassLoss{loss};
  } else if (kind == "visibility") {
    for (const auto& [k, _] : b)
      if (k.starts_with("cavity.")) reject(k);
    const double overlap = require_value();
    if (!(overlap > 0.0 && overlap <= 1.0))
      throw ValidationError(at + "value", "visibility must lie in (0,1]", line_of(b, "value"));
    e.value = Visibility{overlap};
  } else if (kind == "cavity_reflection") {
    reject("value");
    CavityParams c;
    const std::string cp = at + "cavity.";
    if (auto v = number(b, "cavity.input_transmission", Unit::fraction, at)) c.input_transmission = *v;
    if (auto v = number(b, "cavity.end_reflectivity", Unit::fraction, at)) c.end_reflectivity = *v;
    if (auto v = number(b, "cavity.round_trip_loss", Unit::fraction, at)) c.round_trip_loss = *v;
    if (auto v = number(b, "cavity.round_trip_length", Unit::length, at)) c.round_trip_length = *v;
    if (!(c.input_transmission >= 0.0 && c.input_transmission < 1.0))
      throw ValidationError(cp + "input_transmission", "must lie in [0,1)", line_of(b, "cavity.input_transmission"));
    if (!(c.end_reflectivity >= 0.0 && c.end_reflectivity <= 1.0))
      throw ValidationError(cp + "end_reflectivity", "must lie in [0,1]", line_of(b, "cavity.end_reflectivity"));
    if (!(c.round_trip_loss >= 0.0 && c.round_trip_loss < 1.0))
      throw ValidationError(cp + "round_trip_loss", "must lie in [0,1)", line_of(b, "cavity.round_trip_loss"));
    if (!(c.round_trip_length > 0.0))
      throw ValidationError(cp + "round_trip_length", "must be > 0", line_of(b, "cavity.round_trip_length"));
    e.value = CavityReflection{c};
  } else {
    throw ValidationError(at + "kind",
                          "unknown kind '" + kind + "' (static, double_pass, visibility, cavity_reflection)",
                          kind_line);
  }
  return e;
}

}  // namespace detail::cfg

/// Parses and fully validates a configuration. Throws ParseError for
/// malformed text and ValidationError (with key path and line) for values
/// that break an invariant.
inline SimulationConfig parse_config(std::string_view text) {
  using namespace detail::cfg;
  Block globals;
  struct ElementBlock {
    Block keys;
    std::size_t line;
  };
  std::vector<ElementBlock> elements;
  bool in_sections = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name == "chain.element") {
        elements.push_back({{}, line_no});
      } else if (name != "chain") {
        throw ParseError("unknown section [" + std::string(name) + "]", line_no);
      }
      in_sections = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError(key + ": empty value", line_no);

    Block* target = nullptr;
    std::string path = key;
    if (!in_sections) {
      if (!global_keys().count(key)) throw ParseError("unknown key '" + key + "'", line_no);
      target = &globals;
    } else {
      if (elements.empty()) throw ParseError("key '" + key + "' outside a [chain.element] block", line_no);
      path = "chain.element[" + std::to_string(elements.size() - 1) + "]." + key;
      if (!element_keys().count(key)) {
        if (global_keys().count(key))
          throw ParseError("top-level key '" + key + "' must precede the first section", line_no);
        throw ParseError("unknown element key '" + key + "'", line_no);
      }
      target = &elements.back().keys;
    }
    if (target->count(key))
      throw ValidationError(path, "duplicate key (first set on line " + std::to_string(target->at(key).line) + ")",
                            line_no);
    (*target)[key] = Entry{value, line_no};
  }

  SimulationConfig cfg;
  auto& opo = cfg.opo;
  if (auto v = number(globals, "opo.pump_power", Unit::power)) opo.pump_power = *v;
  if (auto v = number(globals, "opo.threshold_power", Unit::power)) opo.threshold_power = *v;
  if (auto v = number(globals, "opo.output_transmission", Unit::fraction)) opo.output_transmission = *v;
  if (auto v = number(globals, "opo.round_trip_loss", Unit::fraction)) opo.round_trip_loss = *v;
  if (auto v = number(globals, "opo.hwhm", Unit::frequency)) opo.hwhm = *v;
  if (auto v = number(globals, "phase_noise.rms_angle", Unit::angle)) cfg.phase_noise.rms_angle = *v;
  if (auto v = number(globals, "sweep.frequency", Unit::frequency)) cfg.frequency = *v;

  auto check = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ValidationError(key, what, line_of(globals, key));
  };
  check(opo.threshold_power > 0.0, "opo.threshold_power", "must be > 0");
  check(opo.pump_power >= 0.0, "opo.pump_power", "must be >= 0");
  check(opo.pump_power < opo.threshold_power, "opo.pump_power",
        "pump power must be below the threshold power (" + std::to_string(opo.threshold_power * 1e3) + " mW)");
  check(opo.output_transmission > 0.0 && opo.output_transmission <= 1.0, "opo.output_transmission",
        "must lie in (0,1]");
  check(opo.round_trip_loss >= 0.0 && opo.round_trip_loss < 1.0, "opo.round_trip_loss", "must lie in [0,1)");
  check(opo.hwhm > 0.0, "opo.hwhm", "must be > 0");
  check(cfg.phase_noise.rms_angle >= 0.0 && cfg.phase_noise.rms_angle < std::numbers::pi / 4,
        "phase_noise.rms_angle", "must lie in [0, pi/4)");
  check(cfg.frequency >= 0.0, "sweep.frequency", "must be >= 0");

  read_grid(globals, "frequency_grid", Unit::frequency, cfg.frequency_grid);
  const bool has_pump_grid = std::any_of(globals.begin(), globals.end(),
                                         [](const auto& kv) { return kv.first.starts_with("pump_grid."); });
  if (has_pump_grid) {
    Grid g{0.0, opo.pump_power, 50, GridScale::linear};
    read_grid(globals, "pump_grid", Unit::power, g);
    check(g.stop < opo.threshold_power, "pump_grid.stop", "must be below the threshold power");
    cfg.pump_grid = g;
  }

  cfg.budget_frequencies.clear();
  if (const auto it = globals.find("budget.frequencies"); it != globals.end()) {
    std::string_view rest = it->second.value;
    std::size_t index = 0;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      Block one{{"f", Entry{std::string(trim(rest.substr(0, comma))), it->second.line}}};
      const auto f = number(one, "f", Unit::frequency);
      if (!f || !(*f >= 0.0))
        throw ValidationError("budget.frequencies[" + std::to_string(index) + "]", "must be >= 0", it->second.line);
      if (!cfg.budget_frequencies.empty() && !(*f > cfg.budget_frequencies.back()))
        throw ValidationError("budget.frequencies", "must be ascending", it->second.line);
      cfg.budget_frequencies.push_back(*f);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      ++index;
    }
  }
  if (cfg.budget_frequencies.empty()) cfg.budget_frequencies = {cfg.frequency};

  for (std::size_t i = 0; i < elements.size(); ++i)
    cfg.chain.elements.push_back(build_element(elements[i].keys, i, elements[i].line));
  return cfg;
}

}  // namespace sqz
