#ifndef SIMREG_CORE_HPP
#define SIMREG_CORE_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace simreg {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

template <class T>
using Ref = Eigen::Ref<T>;

/// Error codes surfaced by the library. The CLI maps them onto exit-code
/// categories (config / data / numeric).
enum class Err {
  // model and configuration
  ShiftOutOfRange,
  FirstCurveNotReference,
  ZeroScale,
  ZeroFirstFourier,
  InvalidParams,
  ZeroArgument,
  MissingCoefficients,
  WrongMode,
  AlphaTooSmall,
  ConfigError,
  // numeric conditions
  QuadratureFailure,
  ZeroDensity,
  DegenerateF1,
  OutOfOrderUpdate,
  Unavailable,
  ZeroScaleEstimate,
  StabilityConditionViolated,
  NegativeVariance,
  ZeroDensityAtShiftedPoint,
  DegenerateWeights,
  // data
  InsufficientData,
  NoBeatsDetected,
  SignalTooShort,
  ParseError,
  FileError,
};

const char* err_name(Err e) noexcept;

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const noexcept { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) { throw Error(code, what); }

}  // namespace simreg

#endif
