#pragma once

#include <stdexcept>
#include <string>

namespace cnorm {

// Base of every failure raised by the library. Each subclass names one
// failure mode so callers can map it to a row marker or an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class NoStabilizingSolution : public Error {
 public:
  using Error::Error;
};

class NormDoesNotExist : public Error {
 public:
  using Error::Error;
};

class MissingDerivativeOutput : public Error {
 public:
  using Error::Error;
};

class PoleEvaluation : public Error {
 public:
  using Error::Error;
};

class ZeroNumerator : public Error {
 public:
  using Error::Error;
};

class ImproperTF : public Error {
 public:
  using Error::Error;
};

class DirectFeedthrough : public Error {
 public:
  using Error::Error;
};

class UnstableResponse : public Error {
 public:
  using Error::Error;
};

class UnknownChannel : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class UnstableClosedLoop : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cnorm
