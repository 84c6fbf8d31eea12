#pragma once

#include <stdexcept>
#include <string>

namespace outsense {

enum class ErrorCode {
  kInvalidArgument,
  kNumericalError,
  kSolverDiverged,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCode::kNumericalError, what) {}
};

class SolverDiverged : public Error {
 public:
  explicit SolverDiverged(const std::string& what)
      : Error(ErrorCode::kSolverDiverged, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace outsense
