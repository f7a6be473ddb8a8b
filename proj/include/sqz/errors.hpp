#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqz {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical argument outside the domain of a model (P >= P_th, an
/// efficiency outside [0,1], a non-positive variance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose values violate an invariant. Carries the key path
/// of the offending entry, e.g. "opo.pump_power" or "chain.element[2].value".
class ValidationError : public Error {
 public:
  ValidationError(std::string key_path, const std::string& what, std::size_t line = 0)
      : Error((line ? "line " + std::to_string(line) + ": " : std::string{}) + key_path + ": " + what),
        key_path_(std::move(key_path)),
        line_(line) {}
  const std::string& key_path() const noexcept { return key_path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_path_;
  std::size_t line_;
};

class FitError : public Error {
 public:
  enum class Kind { insufficient_data, degenerate, non_convergence };

  FitError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Process exit code for an error: 1 for parse/validation/data problems,
/// 2 for numerical domain failures.
inline int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const DomainError*>(&e)) return 2;
  if (auto* fe = dynamic_cast<const FitError*>(&e))
    return fe->kind() == FitError::Kind::non_convergence ? 2 : 1;
  return 1;
}

}  // namespace sqz
