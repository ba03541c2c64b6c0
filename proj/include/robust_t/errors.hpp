#pragma once

#include <stdexcept>
#include <string>

namespace robust_t {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Sample too small for the requested statistic.
class InsufficientDataError : public DomainError {
 public:
  explicit InsufficientDataError(const std::string& what) : DomainError(what) {}
};

// Zero scale estimate (MAD or standard deviation) where a statistic divides by it.
class DegenerateSampleError : public DomainError {
 public:
  explicit DegenerateSampleError(const std::string& what) : DomainError(what) {}
};

// Too many degenerate replications in a simulation run.
class SimulationIntegrityError : public std::runtime_error {
 public:
  explicit SimulationIntegrityError(const std::string& what) : std::runtime_error(what) {}
};

class IncompatibleTableError : public std::runtime_error {
 public:
  explicit IncompatibleTableError(const std::string& what) : std::runtime_error(what) {}
};

class CorruptTableError : public std::runtime_error {
 public:
  explicit CorruptTableError(const std::string& what) : std::runtime_error(what) {}
};

// Input file problems. Row is the 1-based line number, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : std::runtime_error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace robust_t
