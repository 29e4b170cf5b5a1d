#pragma once

#include <stdexcept>
#include <string>

namespace softfish {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidDeformation : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

// Root finder could not bracket or converge. Carries the interval it was given.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, double lo, double hi)
      : Error(what), lo_(lo), hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

private:
  double lo_;
  double hi_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  std::size_t line_;
  std::string field_;
};

class SimulationFault : public Error {
public:
  SimulationFault(const std::string& what, std::string snapshot)
      : Error(what), snapshot_(std::move(snapshot)) {}

  const std::string& snapshot() const noexcept { return snapshot_; }

private:
  std::string snapshot_;
};

} // namespace softfish
