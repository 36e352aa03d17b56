#pragma once

#include <stdexcept>
#include <string>

namespace ilat {

// Base for every failure raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSectorError : public Error {
 public:
  using Error::Error;
};

class SectorEscapeError : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class InvalidDensityError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class DegeneratePacketError : public Error {
 public:
  using Error::Error;
};

class DeflationLeakError : public Error {
 public:
  DeflationLeakError(const std::string& what, double overlap)
      : Error(what), overlap_(overlap) {}
  double overlap() const { return overlap_; }

 private:
  double overlap_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class StepError : public Error {
 public:
  StepError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ilat
