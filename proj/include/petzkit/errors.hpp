#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace petzkit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix expected to be Hermitian deviates beyond tolerance.
class SymmetryError : public Error {
 public:
  SymmetryError(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PositivityError : public Error {
 public:
  PositivityError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class StatisticsError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  FitError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Refusal to allocate a problem larger than the configured cap.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t estimated_bytes)
      : Error(what), estimated_bytes_(estimated_bytes) {}
  std::size_t estimated_bytes() const noexcept { return estimated_bytes_; }

 private:
  std::size_t estimated_bytes_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace petzkit
