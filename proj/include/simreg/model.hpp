#ifndef SIMREG_MODEL_HPP
#define SIMREG_MODEL_HPP

#include <functional>
#include <optional>

#include "simreg/core.hpp"
#include "simreg/rng.hpp"

namespace simreg {

/// Adaptive Simpson integration of f over [lo, hi].
/// Raises QuadratureFailure when the tolerance cannot be met.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol, int max_depth = 48);

/// Common shape function: periodic with period 1 and zero mean over a period.
class ShapeSpec {
public:
  /// f(x) = sum_k c_k cos(2 k pi x) for k = 1..K.
  static ShapeSpec fourier_cosine(Vector coeffs);

  /// Piecewise-linear periodic table on a uniform grid over [-1/2, 1/2).
  /// At least 256 nodes are required and the table must have zero mean.
  static ShapeSpec tabulated(Vector values, bool symmetric);

  /// Evaluate under periodic extension (any real x).
  double operator()(double x) const;

  double f1() const noexcept { return f1_; }
  double g1() const noexcept { return g1_; }
  bool symmetric() const noexcept { return symmetric_; }
  bool is_fourier() const noexcept { return fourier_; }

  /// Cosine coefficients for the Fourier representation, table values otherwise.
  const Vector& data() const noexcept { return data_; }

private:
  ShapeSpec() = default;

  bool fourier_ = true;
  bool symmetric_ = true;
  Vector data_;
  double f1_ = 0.0;
  double g1_ = 0.0;
};

/// First Fourier cosine coefficient of f: analytic c_1/2 for cosine series,
/// adaptive quadrature (tolerance 1e-10) for tabulated shapes.
double fourier_f1(const ShapeSpec& spec);

/// First Fourier sine coefficient (zero for symmetric shapes).
double fourier_g1(const ShapeSpec& spec);

/// Quadrature route for the first Fourier coefficients of any evaluable shape.
double quadrature_f1(const std::function<double(double)>& f, double tol = 1e-10);
double quadrature_g1(const std::function<double(double)>& f, double tol = 1e-10);

/// Design density on the fixed support [-1/2, 1/2].
class DesignDensity {
public:
  static DesignDensity uniform();

  /// User-supplied density; checked at construction for positivity and unit
  /// mass (quadrature, tolerance 1e-8). Sampling uses the inverse CDF when
  /// given, otherwise rejection with an envelope from a 1e4-point grid sup.
  static DesignDensity custom(std::function<double(double)> pdf,
                              std::function<double(double)> inverse_cdf = {});

  double operator()(double x) const;
  bool is_uniform() const noexcept { return uniform_; }
  double sample(CounterRng& rng) const;

  static constexpr double support_lo = -0.5;
  static constexpr double support_hi = 0.5;

private:
  DesignDensity() = default;

  bool uniform_ = true;
  std::function<double(double)> pdf_;
  std::function<double(double)> icdf_;
  double envelope_ = 1.0;
};

/// Deformation parameters of the p curves: heights v, shifts theta, scales a.
struct ModelParams {
  Vector v;
  Vector theta;
  Vector a;

  Index p() const noexcept { return v.size(); }
};

struct Dataset {
  Vector x;      // n design points in [-1/2, 1/2]
  Matrix y;      // n x p responses
  Vector sigma;  // p noise standard deviations; empty when unknown

  Index n() const noexcept { return x.size(); }
  Index p() const noexcept { return y.cols(); }
};

struct ValidationResult {
  bool ok = true;
  std::optional<Err> violation;
  std::string detail;

  explicit operator bool() const noexcept { return ok; }
};

/// Checks the identifiability constraints: a_1 = 1, theta_1 = 0,
/// max_j |theta_j| < 1/4, a_j != 0, and f_1 != 0. Reports the first violation.
ValidationResult validate_identifiability(const ModelParams& params, const ShapeSpec& spec);

enum class NoiseKind { Gaussian, Laplace };

/// Draws n observations of the deformation model. X_i are i.i.d. from the
/// design density, the noise is independent per curve with standard deviation
/// sigma_j. A fixed (seed, params) pair reruns bit-identically: X comes from
/// stream 0 of the seed and the curve-j noise from stream 1+j.
Dataset simulate(const ModelParams& params, const ShapeSpec& spec,
                 const DesignDensity& density, const Vector& sigma, Index n,
                 std::uint64_t seed, NoiseKind noise = NoiseKind::Gaussian);

}  // namespace simreg

#endif
