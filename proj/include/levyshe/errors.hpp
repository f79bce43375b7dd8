#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levyshe {

/// Invalid parameters or configuration. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Any numerical failure (non-finite values, blow-up, degenerate data).
/// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class BlowUpError : public NumericalError
{
public:
  BlowUpError(std::size_t step, double max_abs)
    : NumericalError("blow-up at step " + std::to_string(step) +
                     ", max|u| = " + std::to_string(max_abs))
    , step_(step)
    , max_abs_(max_abs)
  {
  }

  std::size_t step() const { return step_; }
  double max_abs() const { return max_abs_; }

private:
  std::size_t step_;
  double max_abs_;
};

/// A field failed the generator-domain test at its truncation level.
class DomainError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

/// Samples with zero spread: the law is reported as a point mass.
class DegenerateSampleError : public NumericalError
{
public:
  DegenerateSampleError(double location)
    : NumericalError("degenerate samples: point mass at " +
                     std::to_string(location))
    , location_(location)
  {
  }
  double location() const { return location_; }

private:
  double location_;
};

/// Unwritable/unreadable path. Maps to CLI exit code 3.
class IoError : public std::runtime_error
{
public:
  IoError(const std::string& path, const std::string& what)
    : std::runtime_error(what + ": " + path)
    , path_(path)
  {
  }
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

} // namespace levyshe
