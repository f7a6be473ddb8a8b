#pragma once

// Ordered chain of optical efficiencies between the squeezer and the
// photodetector, and the end-to-end detected squeezing it implies.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "sqz/cavity.hpp"
#include "sqz/errors.hpp"
#include "sqz/quadrature.hpp"

namespace sqz {

/// Single pass with power loss `loss`.
struct StaticLoss {
  double loss = 0.0;
};

/// Traversed twice; contributes (1 - loss)^2.
struct DoublePassLoss {
  double loss = 0.0;
};

/// Amplitude mode overlap; contributes overlap^2.
struct Visibility {
  double overlap = 1.0;
};

/// Reflection off a resonant cavity; contributes |r(f)|^2.
struct CavityReflection {
  CavityParams cavity;
};

enum class LossKind { static_loss, double_pass, visibility, cavity_reflection };

using LossValue = std::variant<StaticLoss, DoublePassLoss, Visibility, CavityReflection>;

struct LossElement {
  std::string name;
  LossValue value;

  LossKind kind() const noexcept { return static_cast<LossKind>(value.index()); }
};

struct LossChain {
  std::vector<LossElement> elements;
};

inline std::string_view kind_name(LossKind k) noexcept {
  switch (k) {
    case LossKind::static_loss: return "static";
    case LossKind::double_pass: return "double_pass";
    case LossKind::visibility: return "visibility";
    case LossKind::cavity_reflection: return "cavity_reflection";
  }
  return "?";
}

inline void validate(const LossElement& e) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StaticLoss> || std::is_same_v<T, DoublePassLoss>) {
          if (!(v.loss >= 0.0 && v.loss < 1.0))
            throw DomainError("element '" + e.name + "': loss must lie in [0,1)");
        } else if constexpr (std::is_same_v<T, Visibility>) {
          if (!(v.overlap > 0.0 && v.overlap <= 1.0))
            throw DomainError("element '" + e.name + "': visibility must lie in (0,1]");
        } else {
          validate(v.cavity);
        }
      },
      e.value);
}

/// Power efficiency of one element at sideband frequency f.
inline double efficiency(const LossElement& e, double frequency) {
  validate(e);
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StaticLoss>) {
          return 1.0 - v.loss;
        } else if constexpr (std::is_same_v<T, DoublePassLoss>) {
          return (1.0 - v.loss) * (1.0 - v.loss);
        } else if constexpr (std::is_same_v<T, Visibility>) {
          return v.overlap * v.overlap;
        } else {
          return power_reflectivity(v.cavity, frequency);
        }
      },
      e.value);
}

/// Total detection efficiency: the product of all element efficiencies at f.
inline double chain_efficiency(const LossChain& chain, double frequency) {
  if (!(frequency >= 0.0)) throw DomainError("frequency must be >= 0");
  double eta = 1.0;
  for (const auto& e : chain.elements) eta *= efficiency(e, frequency);
  return eta;
}

/// Squeezing and anti-squeezing in dB after the OPO output passes `chain` and
/// suffers quadrature jitter `pn`.
inline VariancePairDb detected_squeezing(const OpoParams& opo, const LossChain& chain,
                                         const PhaseNoise& pn, double frequency) {
  const VariancePair pure = opo_variances(opo, 1.0, frequency);
  const VariancePair lossy = apply_loss(pure, chain_efficiency(chain, frequency));
  return to_db(rotate_phase_noise(lossy, pn));
}

struct BudgetReport {
  std::vector<double> frequencies;
  std::vector<std::string> names;
  // [element][grid index]
  std::vector<std::vector<double>> per_element;
  std::vector<std::vector<double>> cumulative;
  std::vector<double> total;
};

inline BudgetReport budget_report(const LossChain& chain, std::span<const double> grid) {
  if (grid.empty()) throw DomainError("budget report needs a non-empty frequency grid");
  if (!(grid.front() >= 0.0)) throw DomainError("budget frequencies must be >= 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("budget frequency grid must be ascending");

  BudgetReport r;
  r.frequencies.assign(grid.begin(), grid.end());
  r.total.assign(grid.size(), 1.0);
  for (const auto& e : chain.elements) {
    r.names.push_back(e.name);
    auto& per = r.per_element.emplace_back(grid.size());
    auto& cum = r.cumulative.emplace_back(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      per[i] = efficiency(e, grid[i]);
      r.total[i] *= per[i];
      cum[i] = r.total[i];
    }
  }
  return r;
}

}  // namespace sqz
