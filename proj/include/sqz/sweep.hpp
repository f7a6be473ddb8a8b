#pragma once

// Sweep orchestration: evaluates detected squeezing over frequency or pump
// power grids, optionally fanning the grid out over worker threads. Rows are
// always assembled in grid order.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sqz/config.hpp"
#include "sqz/csv.hpp"
#include "sqz/loss_budget.hpp"

namespace sqz {

/// out[i] = fn(i) for i in [0, n), computed on up to `workers` threads. If any
/// call throws, the exception of the lowest failing index is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, unsigned workers = std::thread::hardware_concurrency()) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline SweepOutput sweep_frequency(const SimulationConfig& cfg, unsigned workers = std::thread::hardware_concurrency()) {
  const auto grid = cfg.frequency_grid.samples();
  SweepOutput out{SweepAxis::frequency, {}};
  out.rows = parallel_map<SweepRow>(
      grid.size(),
      [&](std::size_t i) {
        const double f = grid[i];
        const auto db = detected_squeezing(cfg.opo, cfg.chain, cfg.phase_noise, f);
        return SweepRow{f, db.squeezing_db, db.anti_squeezing_db, chain_efficiency(cfg.chain, f)};
      },
      workers);
  return out;
}

/// Sweeps pump power at cfg.frequency. Without a configured pump grid the
/// sweep runs linearly from 0 to the configured pump power in 50 points.
inline SweepOutput sweep_pump(const SimulationConfig& cfg, unsigned workers = std::thread::hardware_concurrency()) {
  const Grid g = cfg.pump_grid.value_or(Grid{0.0, cfg.opo.pump_power, 50, GridScale::linear});
  const auto grid = g.samples();
  const double eta = chain_efficiency(cfg.chain, cfg.frequency);
  SweepOutput out{SweepAxis::pump_power, {}};
  out.rows = parallel_map<SweepRow>(
      grid.size(),
      [&](std::size_t i) {
        OpoParams opo = cfg.opo;
        opo.pump_power = grid[i];
        const auto db = detected_squeezing(opo, cfg.chain, cfg.phase_noise, cfg.frequency);
        return SweepRow{to_milli(grid[i]), db.squeezing_db, db.anti_squeezing_db, eta};
      },
      workers);
  return out;
}

inline constexpr std::string_view budget_header = "element,kind,frequency_hz,efficiency,cumulative";

/// Machine-readable budget: one row per (element, frequency) followed by a
/// "total" row per frequency.
inline void write_budget_csv(std::ostream& os, const LossChain& chain, const BudgetReport& r) {
  os << budget_header << '\n';
  for (std::size_t e = 0; e < r.names.size(); ++e)
    for (std::size_t i = 0; i < r.frequencies.size(); ++i)
      os << r.names[e] << ',' << kind_name(chain.elements[e].kind()) << ',' << format_number(r.frequencies[i]) << ','
         << format_number(r.per_element[e][i]) << ',' << format_number(r.cumulative[e][i]) << '\n';
  for (std::size_t i = 0; i < r.frequencies.size(); ++i)
    os << "total,," << format_number(r.frequencies[i]) << ',' << format_number(r.total[i]) << ','
       << format_number(r.total[i]) << '\n';
}

/// Human-readable budget table with efficiencies and losses in percent.
inline void write_budget_table(std::ostream& os, const LossChain& chain, const BudgetReport& r) {
  std::size_t width = 5;
  for (const auto& n : r.names) width = std::max(width, n.size());
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::fixed;
  for (std::size_t i = 0; i < r.frequencies.size(); ++i) {
    s << "f = " << std::setprecision(1) << r.frequencies[i] << " Hz\n";
    s << "  " << std::left << std::setw(static_cast<int>(width)) << "element" << "  " << std::setw(17) << "kind"
      << std::right << std::setw(11) << "efficiency" << std::setw(11) << "cumulative" << std::setw(9) << "loss"
      << '\n';
    for (std::size_t e = 0; e < r.names.size(); ++e)
      s << "  " << std::left << std::setw(static_cast<int>(width)) << r.names[e] << "  " << std::setw(17)
        << kind_name(chain.elements[e].kind()) << std::right << std::setprecision(5) << std::setw(11)
        << r.per_element[e][i] << std::setw(11) << r.cumulative[e][i] << std::setprecision(2) << std::setw(8)
        << 100.0 * (1.0 - r.cumulative[e][i]) << "%\n";
    s << "  " << std::left << std::setw(static_cast<int>(width)) << "total" << "  " << std::setw(17) << ""
      << std::right << std::setprecision(5) << std::setw(11) << r.total[i] << std::setw(11) << r.total[i]
      << std::setprecision(2) << std::setw(8) << 100.0 * (1.0 - r.total[i]) << "%\n";
  }
  os << s.str();
}

}  // namespace sqz
