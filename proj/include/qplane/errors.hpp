#pragma once

#include <stdexcept>
#include <string>

namespace qplane {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter set violates one of its documented invariants. The message
/// names the violated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Config file / key-value parsing problems (unknown key, bad unit, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A netlist is malformed (dangling edge, unflagged boundary side, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// The traveling-wave tracker lost the potential minimum.
class TrackingError : public Error {
 public:
  using Error::Error;
};

/// A fit was requested on insufficient or degenerate data.
class FitError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive search was asked to run beyond its tractable size.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace qplane
