#pragma once

#include <stdexcept>
#include <string>

namespace radwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NotPSD : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// A Kronecker-type product would exceed the configured entry cap.
class Overflow : public Error {
 public:
  using Error::Error;
};

class BadArity : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied parameters (laws, configs, multi-indices).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace radwalk
