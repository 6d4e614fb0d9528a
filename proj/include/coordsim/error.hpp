#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coordsim {

enum class ErrorCode {
  NotHermitian,
  NotUnitTrace,
  NotPSD,
  DimensionCap,
  BadCut,
  DimMismatch,
  TopologyMismatch,
  ShapeOverflow,
  LengthMismatch,
  InfeasibleExtension,
  BudgetExceeded,
  ParseError,
  ValidationError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is stable
/// and is what the CLI maps onto process exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by exhaustive searches that run out of their evaluation budget. The
/// best objective found so far travels with the exception.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& message, double best)
      : Error(ErrorCode::BudgetExceeded, message), best_(best) {}

  double best() const noexcept { return best_; }

 private:
  double best_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, std::string reason)
      : Error(ErrorCode::ValidationError, field + ": " + reason),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace coordsim
