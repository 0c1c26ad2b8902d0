#pragma once

#include <stdexcept>
#include <string>

namespace expeda {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of operands do not agree, or an index is out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A dense d x d computation was requested above the configured oracle cap.
class OracleScaleError : public Error {
 public:
  OracleScaleError(std::size_t dim, std::size_t cap)
      : Error("dense computation at dimension " + std::to_string(dim) +
              " exceeds oracle cap " + std::to_string(cap)),
        dim_(dim),
        cap_(cap) {}
  std::size_t dim() const noexcept { return dim_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t dim_;
  std::size_t cap_;
};

/// Input that must be symmetric is not.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Invalid data: non-finite entries, empty classes, malformed files.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The within-class scatter is singular where a method needs it invertible.
class SmallSampleSizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or solver configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace expeda
