#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed profile text. `offset()` is the byte offset into the input.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, WrongVariable, NonConstantExponent };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Pole, log/sqrt of an invalid argument, or a non-finite intermediate.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Query outside the declared domain of a profile or system.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A metric, bilinear form or radicand degenerates at a point.
class DegenerateError : public Error {
 public:
  DegenerateError(const std::string& what, double x, double y)
      : Error(what + " at (" + std::to_string(x) + ", " + std::to_string(y) + ")"), x_(x), y_(y) {}

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

 private:
  double x_, y_;
};

/// Numerical procedure failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid scene file / configuration. `path()` is a JSON-pointer-like field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace plv
