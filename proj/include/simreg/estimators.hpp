#ifndef SIMREG_ESTIMATORS_HPP
#define SIMREG_ESTIMATORS_HPP

#include <optional>
#include <vector>

#include "simreg/core.hpp"
#include "simreg/model.hpp"

namespace simreg {

/// Clamp onto K = [-1/4, 1/4].
inline double rm_project(double x) noexcept {
  if (x > 0.25) return 0.25;
  if (x < -0.25) return -0.25;
  return x;
}

/// Innovation vector of the shift recursion. Symmetric mode:
///   T_j = sin(2 pi (x - t_j)) y_j / g(x).
/// Non-symmetric mode (needs the first Fourier coefficients of the shape):
///   T_j = [f1 sin(2 pi (x - t_j)) - g1 cos(2 pi (x - t_j))] y_j / g(x).
Vector rm_innovation(double x, const Ref<const Vector>& y_row,
                     const Ref<const Vector>& theta_hat, const DesignDensity& density,
                     std::optional<std::pair<double, double>> fourier = std::nullopt);

/// Per-curve gain scales making the shift recursion asymptotically efficient:
/// gamma_j = 1 / (2 pi a_j f1), to be run as a gamma_j / n schedule.
Vector efficient_gains(double f1, const Ref<const Vector>& a);

/// Componentwise min-magnitude selection between the two sign-free chains;
/// ties go to the plus chain.
Vector dual_select(const Ref<const Vector>& plus, const Ref<const Vector>& minus);

/// Streaming height estimator: v_hat_j = (1/n) sum Y_ij / g(X_i).
class HeightState {
public:
  explicit HeightState(Index p, bool record_trajectory = false)
      : sum_(Vector::Zero(p)), record_(record_trajectory) {}

  void update(double x, const Ref<const Vector>& y_row, const DesignDensity& density);

  Index n() const noexcept { return n_; }
  Vector estimate() const;
  const std::vector<Vector>& trajectory() const noexcept { return trajectory_; }

private:
  Index n_ = 0;
  Vector sum_;
  bool record_;
  std::vector<Vector> trajectory_;
};

enum class SignMode { Known, DualRun };

struct RMOptions {
  SignMode sign_mode = SignMode::Known;
  Vector signs;       // per-curve sign of a_j f_1; required in Known mode
  Vector gain_scale;  // c_j for a c_j/n schedule; empty means 1/n
  bool symmetric = true;
  double f1 = 0.0;  // used by the non-symmetric innovation
  double g1 = 0.0;
  Vector theta0;  // initial value in K^p; empty means 0
};

/// Projected Robbins-Monro recursion for the shift vector,
///   theta_{n+1,j} = pi_K(theta_{n,j} + gamma_{n+1} s_j T_{n+1,j}).
/// DualRun mode advances a +gamma and a -gamma chain per Remark-style sign-free
/// operation and selects per component the chain of smaller magnitude.
class RMState {
public:
  RMState(Index p, RMOptions options);

  void step(double x, const Ref<const Vector>& y_row, const DesignDensity& density);

  Index n() const noexcept { return n_; }
  Index p() const noexcept { return theta_.size(); }
  SignMode mode() const noexcept { return opt_.sign_mode; }

  /// Current shift estimate: the single chain in Known mode, the per-component
  /// min-magnitude selection in DualRun mode (ties go to the plus chain).
  Vector estimate() const;

  /// DualRun selection as a standalone operation.
  Vector dual_select() const;

  const Vector& chain() const;        // Known mode
  const Vector& chain_plus() const;   // DualRun mode
  const Vector& chain_minus() const;  // DualRun mode

  /// Number of projections that clipped, per curve. In DualRun mode this is
  /// the count for the currently selected chain of each component.
  Eigen::ArrayXi truncation_count() const;
  const Eigen::ArrayXi& truncations_plus() const noexcept { return trunc_plus_; }
  const Eigen::ArrayXi& truncations_minus() const noexcept { return trunc_minus_; }

private:
  double gain(Index j, Index n_next) const;

  RMOptions opt_;
  Index n_ = 0;
  Vector theta_;        // Known-mode chain
  Vector theta_plus_;   // DualRun chains
  Vector theta_minus_;
  Eigen::ArrayXi trunc_;
  Eigen::ArrayXi trunc_plus_;
  Eigen::ArrayXi trunc_minus_;
};

/// Streaming estimator of the first Fourier coefficient,
/// f1_hat = (1/n) sum cos(2 pi X_i) Y_{i,1} / g(X_i).
class F1State {
public:
  void update(double x, const Ref<const Vector>& y_row, const DesignDensity& density);

  Index n() const noexcept { return n_; }
  double estimate() const;

private:
  Index n_ = 0;
  double sum_ = 0.0;
};

/// Streaming scale estimator built on the one-step-lagged shift estimate:
///   cos_sum_j = sum_i cos(2 pi (X_i - theta_{i-1,j})) Y_ij / g(X_i),
/// a_hat_j = cos_sum_j / (n f1).
class ScaleState {
public:
  explicit ScaleState(Index p) : cos_sum_(Vector::Zero(p)) {}

  void update(double x, const Ref<const Vector>& y_row, const Ref<const Vector>& theta_prev,
              const DesignDensity& density);

  Index n() const noexcept { return n_; }

  /// Estimate with the given f1 (known or plugged-in). Reports nothing when
  /// |f1| < 1e-8 instead of producing a near-infinite value.
  std::optional<Vector> estimate(double f1) const;

  const Vector& cos_sum() const noexcept { return cos_sum_; }

private:
  Index n_ = 0;
  Vector cos_sum_;
};

}  // namespace simreg

#endif
