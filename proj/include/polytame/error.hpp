#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polytame {

enum class Errc {
  precondition,
  evaluation_overflow,
  at_root,
  derivative_zero,
  coincident_nodes,
  zero_denominator,
  tame_collision,
  cancellation,
  pole,
  at_origin,
  monicity,
  insufficient_data,
  stagnation,
  construction_failure,
  parse_error,
  leading_zero,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::precondition: return "precondition";
    case Errc::evaluation_overflow: return "evaluation-overflow";
    case Errc::at_root: return "at-root";
    case Errc::derivative_zero: return "derivative-zero";
    case Errc::coincident_nodes: return "coincident-nodes";
    case Errc::zero_denominator: return "zero-denominator";
    case Errc::tame_collision: return "tame-collision";
    case Errc::cancellation: return "cancellation";
    case Errc::pole: return "pole";
    case Errc::at_origin: return "at-origin";
    case Errc::monicity: return "monicity";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::stagnation: return "stagnation";
    case Errc::construction_failure: return "construction-failure";
    case Errc::parse_error: return "parse-error";
    case Errc::leading_zero: return "leading-zero";
  }
  return "unknown";
}

/// Error raised by every operation in the library. The code is what callers
/// branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Input text could not be read. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(Errc code, const std::string& what, int line, int column)
      : Error(code, what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

inline void require(bool condition, const char* what) {
  if (!condition) throw Error(Errc::precondition, what);
}

// Steps whose failure the driver may recover from by nudging the
// approximation off a measure-zero trap.
constexpr bool is_perturbable(Errc code) noexcept {
  return code == Errc::derivative_zero || code == Errc::coincident_nodes ||
         code == Errc::zero_denominator || code == Errc::tame_collision ||
         code == Errc::cancellation || code == Errc::at_origin;
}

}  // namespace polytame
