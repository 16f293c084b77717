#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lgconn {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A function evaluation produced NaN/Inf. `coordinate` is the input (or output)
/// index that triggered it, or npos when unknown.
class NumericalFailure : public Error
{
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit NumericalFailure(const std::string & what, std::size_t coordinate = npos)
      : Error(what), coordinate_(coordinate)
  {}

  std::size_t coordinate() const noexcept { return coordinate_; }

private:
  std::size_t coordinate_;
};

/// A point left the single global chart of a group or field.
class ChartExit : public Error
{
public:
  using Error::Error;
};

/// A Jacobian block is singular or its condition number exceeds the threshold.
class SingularJacobian : public Error
{
public:
  using Error::Error;
};

/// A candidate LGFB connection failed validation where a valid one is required.
class InvalidEta : public Error
{
public:
  using Error::Error;
};

/// Invalid scenario / configuration. `key` names the offending entry.
class ConfigError : public Error
{
public:
  ConfigError(std::string key, const std::string & message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key))
  {}

  const std::string & key() const noexcept { return key_; }

private:
  std::string key_;
};

}  // namespace lgconn
