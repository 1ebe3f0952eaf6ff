#pragma once

#include <stdexcept>
#include <string>

namespace gvm {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateHorizontalProjection : public Error {
 public:
  using Error::Error;
};
class GravityParallelToView : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class UnknownJoint : public Error {
 public:
  using Error::Error;
};
class ProbabilityOutOfRange : public Error {
 public:
  using Error::Error;
};
class OddDimension : public Error {
 public:
  using Error::Error;
};
class NonPositiveScale : public Error {
 public:
  using Error::Error;
};
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};
class TooShort : public Error {
 public:
  using Error::Error;
};
class ZeroPathLength : public Error {
 public:
  using Error::Error;
};
class NoContactFrames : public Error {
 public:
  using Error::Error;
};
class BadConfig : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class VersionUnsupported : public Error {
 public:
  using Error::Error;
};
class NormViolation : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gvm
