#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cosmo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the 0-based byte position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Numeric evaluation left the real domain (sqrt of negative, 1/0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A free symbol or opaque function had no binding during evaluation.
class UnboundError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on an expression shape it does not support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class NonlinearError : public Error {
 public:
  using Error::Error;
};

/// Sampling could not evaluate the expression at any point.
class UndecidableError : public Error {
 public:
  using Error::Error;
};

class SessionError : public Error {
 public:
  using Error::Error;
};

class SessionVersionError : public SessionError {
 public:
  using SessionError::SessionError;
};

/// The prescribed expansion needs a negative scalar kinetic term.
class NegativeKineticError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class ConstraintError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

}  // namespace cosmo
