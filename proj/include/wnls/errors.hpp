#pragma once

#include <stdexcept>
#include <string>

namespace wnls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (dimension, cutoff, beta >= 0, unknown keys, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Grid too small for an alias-free transform of the requested product.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state produced during time integration.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class DegenerateEnsembleError : public Error {
 public:
  using Error::Error;
};

class ProjectionError : public Error {
 public:
  using Error::Error;
};

/// No ensemble member fell inside the requested level-set shell.
class InfeasibleLevelError : public Error {
 public:
  InfeasibleLevelError(const std::string& what, double suggested_delta)
      : Error(what), suggested_delta_(suggested_delta) {}
  double suggested_delta() const { return suggested_delta_; }

 private:
  double suggested_delta_;
};

class UndefinedSurfaceError : public Error {
 public:
  using Error::Error;
};

class StatTestError : public Error {
 public:
  using Error::Error;
};

}  // namespace wnls
