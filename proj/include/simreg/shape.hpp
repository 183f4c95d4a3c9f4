#ifndef SIMREG_SHAPE_HPP
#define SIMREG_SHAPE_HPP

#include <functional>
#include <optional>

#include "simreg/core.hpp"
#include "simreg/model.hpp"

namespace simreg {

/// Kernel for the recursive Nadaraya-Watson estimator: nonnegative, symmetric,
/// compactly supported, unit mass. nu2 = int K^2 is fixed at construction.
class KernelSpec {
public:
  static KernelSpec uniform();       // 1/2 on [-1, 1], nu2 = 1/2
  static KernelSpec epanechnikov();  // 3/4 (1 - u^2) on [-1, 1], nu2 = 3/5

  /// Symmetric table on [-half_width, half_width], linearly interpolated.
  /// Mass and nonnegativity are checked by quadrature at tolerance 1e-8.
  static KernelSpec table(Vector values, double half_width);

  double operator()(double u) const;
  double nu2() const noexcept { return nu2_; }
  double half_width() const noexcept { return half_width_; }

private:
  KernelSpec() = default;

  enum class Kind { Uniform, Epanechnikov, Table } kind_ = Kind::Uniform;
  Vector table_;
  double half_width_ = 1.0;
  double nu2_ = 0.5;
};

/// Evaluation weights omega_j(x): even in x, nonnegative, summing to one.
struct WeightRule {
  enum class Kind { Uniform, Custom } kind = Kind::Uniform;
  std::function<Vector(double)> fn;  // Custom only

  static WeightRule uniform() { return {}; }
  static WeightRule custom(std::function<Vector(double)> f) {
    WeightRule r;
    r.kind = Kind::Custom;
    r.fn = std::move(f);
    return r;
  }

  Vector at(double x, Index p) const;
};

/// Variance-minimizing weights under the sum/evenness constraint:
/// omega_j(x) proportional to a_j^2 (g(theta_j + x) + g(theta_j - x)) / sigma_j^2.
Vector weights_optimal(double x, const ModelParams& params, const Ref<const Vector>& sigma,
                       const DesignDensity& density);

Vector linspace(double lo, double hi, Index points);
Vector uniform_grid(Index points);  // sorted abscissae covering [-1/2, 1/2]

struct NWConfig {
  double alpha = 0.9;  // bandwidth exponent, h_n = n^-alpha, needs (0,1)
  KernelSpec kernel = KernelSpec::uniform();
  WeightRule weights;
  Vector grid = uniform_grid(101);
  bool symmetrize = true;  // add the mirrored W(-x) term (symmetric shapes)

  void validate(Index p) const;
  /// Theorem-grade pointwise normality needs alpha > 1/3; smaller alpha is
  /// accepted for estimation but flagged here.
  bool clt_valid() const noexcept { return alpha > 1.0 / 3.0; }
};

/// Streaming numerator/denominator accumulators of the weighted symmetrized
/// recursive Nadaraya-Watson estimator over a fixed evaluation grid.
class NWState {
public:
  NWState(NWConfig config, Index p);

  /// Feed observation i (1-based, strictly sequential) with the step-(i-1)
  /// shift and height estimates.
  void update(Index i, double x_obs, const Ref<const Vector>& y_row,
              const Ref<const Vector>& theta_prev, const Ref<const Vector>& v_prev);

  /// Weighted estimate f_hat_n at grid point k. Curves with an empty kernel
  /// window are dropped and their weight renormalized over the remaining
  /// curves; returns nothing when every curve is empty.
  std::optional<double> evaluate(Index k, const Ref<const Vector>& a_hat) const;

  /// Single-curve estimate f_hat_{n,j} at grid point k.
  std::optional<double> evaluate_curve(Index k, Index j, double a_hat_j) const;

  /// Locate a grid point by abscissa (within tolerance); raises Unavailable
  /// when x is not on the grid.
  Index grid_index(double x, double tol = 1e-9) const;

  Index n() const noexcept { return n_; }
  Index p() const noexcept { return num_.cols(); }
  const NWConfig& config() const noexcept { return cfg_; }
  const Matrix& num() const noexcept { return num_; }
  const Matrix& den() const noexcept { return den_; }

private:
  NWConfig cfg_;
  Index n_ = 0;
  Matrix num_;  // grid x p
  Matrix den_;  // grid x p
};

}  // namespace simreg

#endif
