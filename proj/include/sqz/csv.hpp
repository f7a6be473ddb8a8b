#pragma once

// CSV emission and ingestion. Numbers use the shortest decimal that round
// trips to the same double, with '.' as separator regardless of locale.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/estimation.hpp"

namespace sqz {

inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DomainError("cannot format number");
  return std::string(buf, ptr);
}

/// W -> mW, snapped to 15 significant digits so that config values such as
/// "45 mW" print back as 45 rather than 45.00000000000001.
inline double to_milli(double watts) {
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof buf, watts * 1e3, std::chars_format::general, 15).ptr;
  double v = 0.0;
  std::from_chars(buf, end, v);
  return v;
}

enum class SweepAxis { frequency, pump_power };

struct SweepRow {
  double x = 0.0;  // Hz or mW, per axis
  double squeezing_db = 0.0;
  double anti_squeezing_db = 0.0;
  double efficiency = 1.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepOutput {
  SweepAxis axis = SweepAxis::frequency;
  std::vector<SweepRow> rows;
};

inline constexpr std::string_view frequency_sweep_header = "frequency_hz,squeezing_db,antisqueezing_db,efficiency";
inline constexpr std::string_view pump_sweep_header = "pump_power_mw,squeezing_db,antisqueezing_db,efficiency";
inline constexpr std::string_view measurement_header = "pump_power_mw,squeezing_db,antisqueezing_db,frequency_hz";

inline void write_csv(std::ostream& os, const SweepOutput& out) {
  os << (out.axis == SweepAxis::frequency ? frequency_sweep_header : pump_sweep_header) << '\n';
  for (const auto& r : out.rows)
    os << format_number(r.x) << ',' << format_number(r.squeezing_db) << ',' << format_number(r.anti_squeezing_db)
       << ',' << format_number(r.efficiency) << '\n';
}

namespace detail::csv {

/// Splits `text` into lines (LF, tolerating CRLF). Trailing empty line dropped.
inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

inline std::vector<double> numbers(std::string_view line, std::size_t expected, std::size_t line_no) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
      throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(out.size() + 1) +
                           ": not a number: '" + std::string(field) + "'",
                       line_no);
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected)
    throw ParseError("row " + std::to_string(line_no) + ": expected " + std::to_string(expected) + " columns, got " +
                         std::to_string(out.size()),
                     line_no);
  return out;
}

}  // namespace detail::csv

/// Parses CSV produced by write_csv.
inline SweepOutput parse_sweep_csv(std::string_view text) {
  const auto ls = detail::csv::lines(text);
  if (ls.empty()) throw ParseError("empty sweep CSV: missing header", 1);
  SweepOutput out;
  if (ls[0] == frequency_sweep_header) out.axis = SweepAxis::frequency;
  else if (ls[0] == pump_sweep_header) out.axis = SweepAxis::pump_power;
  else throw ParseError("unrecognized sweep header '" + std::string(ls[0]) + "'", 1);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto v = detail::csv::numbers(ls[i], 4, i + 1);
    out.rows.push_back({v[0], v[1], v[2], v[3]});
  }
  return out;
}

/// Reads measurement records (pump power in mW in the file, W in memory).
/// Blank lines are skipped; errors report the 1-based file line.
inline std::vector<MeasurementRecord> parse_measurements_csv(std::string_view text) {
  const auto ls = detail::csv::lines(text);
  std::size_t first = 0;
  while (first < ls.size() && ls[first].find_first_not_of(" \t") == std::string_view::npos) ++first;
  if (first == ls.size()) throw ParseError("empty measurement file: missing header '" + std::string(measurement_header) + "'", 1);
  if (ls[first] != measurement_header)
    throw ParseError("expected header '" + std::string(measurement_header) + "', got '" + std::string(ls[first]) + "'",
                     first + 1);
  std::vector<MeasurementRecord> out;
  for (std::size_t i = first + 1; i < ls.size(); ++i) {
    if (ls[i].find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto v = detail::csv::numbers(ls[i], 4, i + 1);
    MeasurementRecord r{v[0] * 1e-3, v[1], v[2], v[3]};
    const std::string row = "row " + std::to_string(i + 1) + ": ";
    if (!(r.pump_power > 0.0)) throw ParseError(row + "pump_power_mw must be > 0", i + 1);
    if (!(r.squeezing_db <= 0.0)) throw ParseError(row + "squeezing_db must be <= 0", i + 1);
    if (!(r.anti_squeezing_db >= 0.0)) throw ParseError(row + "antisqueezing_db must be >= 0", i + 1);
    if (!(r.frequency >= 0.0)) throw ParseError(row + "frequency_hz must be >= 0", i + 1);
    out.push_back(r);
  }
  return out;
}

inline void write_measurements_csv(std::ostream& os, std::span<const MeasurementRecord> records) {
  os << measurement_header << '\n';
  for (const auto& r : records)
    os << format_number(to_milli(r.pump_power)) << ',' << format_number(r.squeezing_db) << ','
       << format_number(r.anti_squeezing_db) << ',' << format_number(r.frequency) << '\n';
}

}  // namespace sqz
