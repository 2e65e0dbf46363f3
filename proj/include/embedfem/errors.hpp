#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace embedfem {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point could not be located in a mesh (or structure).
class NotFound : public Error {
 public:
  using Error::Error;
};

/// Inverted or degenerate element geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// The saddle system is singular: the coupled problem is not well posed.
class WellPosednessError : public Error {
 public:
  WellPosednessError(const std::string& what, long pivot_index)
      : Error(what), pivot_index_(pivot_index) {}
  [[nodiscard]] long pivot_index() const { return pivot_index_; }

 private:
  long pivot_index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

/// Configuration validation failure carrying every problem found, each
/// prefixed with its document path (e.g. `solid.material.E`).
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

}  // namespace embedfem
