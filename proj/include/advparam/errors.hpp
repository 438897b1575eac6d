#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace advparam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions between parameters, inputs or budgets.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise out-of-domain numeric input.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (empty batch, bad option, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. Carries the byte offset where parsing stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// A constructive procedure refused to run because one of its hypotheses
/// does not hold. `condition()` names the failing hypothesis.
class ConditionError : public Error {
 public:
  ConditionError(std::string condition, const std::string& detail);
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

}  // namespace advparam
