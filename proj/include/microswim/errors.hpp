#pragma once

#include <stdexcept>
#include <string>

namespace microswim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical parameter that must be strictly positive is not.
class NonPositiveParameter : public Error {
 public:
  explicit NonPositiveParameter(std::string name)
      : Error("parameter '" + name + "' must be > 0"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// A link magnetization is zero.
class ZeroMagnetization : public Error {
 public:
  explicit ZeroMagnetization(std::string name)
      : Error("magnetization '" + name + "' must be nonzero"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// The resistance matrix is numerically singular. Never expected for a
/// drag-dominated swimmer, so this points at an assembly bug.
class SingularResistance : public Error {
 public:
  using Error::Error;
};

/// Finite differences and truncated-series arithmetic disagree.
class InconsistentMethods : public Error {
 public:
  using Error::Error;
};

/// A computed coefficient does not match its closed form.
class OracleMismatch : public Error {
 public:
  OracleMismatch(std::string id, double computed, double expected)
      : Error("oracle mismatch for " + id + ": computed " + std::to_string(computed) +
              ", closed form " + std::to_string(expected)),
        id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// Parameters for which the normal-coordinate change is undefined
/// (M1 == M2 or M1 + M2 == 0).
class DegenerateParams : public Error {
 public:
  using Error::Error;
};

/// Least-squares identification left a large residual.
class PoorFit : public Error {
 public:
  using Error::Error;
};

class StepSizeUnderflow : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Caller passed an argument outside an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace microswim
