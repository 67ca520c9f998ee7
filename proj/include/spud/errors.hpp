#pragma once

#include <stdexcept>
#include <string>

namespace spud {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown model, missing or superfluous parameter, value
/// outside its domain.
class UsageError : public Error {
  public:
    using Error::Error;
};

/// Query-side text pipeline does not match the one the index was built with.
class ConfigError : public UsageError {
  public:
    using UsageError::UsageError;
};

/// Malformed or unreadable input data.
class DataError : public Error {
  public:
    using Error::Error;
};

class IoError : public DataError {
  public:
    using DataError::DataError;
};

class VersionMismatchError : public DataError {
  public:
    using DataError::DataError;
};

class ChecksumError : public DataError {
  public:
    using DataError::DataError;
};

class TruncatedFileError : public DataError {
  public:
    using DataError::DataError;
};

/// Argument outside the mathematical domain of a function (digamma at x <= 0,
/// omega at 0 or 1, ...).
class DomainError : public UsageError {
  public:
    using UsageError::UsageError;
};

/// Iterative estimator produced a non-positive or non-finite iterate.
class DivergenceError : public Error {
  public:
    DivergenceError(std::string const& what, double last_value, std::size_t iteration)
        : Error(what), m_last_value(last_value), m_iteration(iteration) {}

    [[nodiscard]] double last_value() const noexcept { return m_last_value; }
    [[nodiscard]] std::size_t iteration() const noexcept { return m_iteration; }

  private:
    double m_last_value;
    std::size_t m_iteration;
};

}  // namespace spud
