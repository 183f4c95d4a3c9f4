#ifndef SIMREG_FIT_HPP
#define SIMREG_FIT_HPP

#include <optional>
#include <utility>
#include <vector>

#include "simreg/core.hpp"
#include "simreg/estimators.hpp"
#include "simreg/model.hpp"
#include "simreg/shape.hpp"

namespace simreg {

struct FitOptions {
  SignMode sign_mode = SignMode::Known;
  Vector signs;       // Known mode: sign of a_j f1 per curve
  Vector gain_scale;  // optional c_j/n schedule
  bool symmetric = true;
  std::optional<std::pair<double, double>> fourier;  // (f1, g1) for the non-symmetric innovation
  std::optional<double> f1_known;                    // scale divides by this instead of f1_hat
  Vector theta0;
  bool with_shape = true;
  NWConfig nw;
  bool record_trajectories = false;
};

struct FitResult {
  Index n = 0;
  Vector v_hat;
  Vector theta_hat;
  std::optional<Vector> a_hat;  // absent when the f1 divisor degenerates
  double f1_hat = 0.0;          // streaming estimate from the first curve
  double f1_used = 0.0;         // divisor actually used for the scales
  Eigen::ArrayXi truncations;
  Vector f_grid;  // f_hat on nw.grid; NaN where unavailable; empty without shape
  std::optional<NWState> nw;
  std::vector<Vector> v_trajectory;
  std::vector<Vector> theta_trajectory;
};

/// One full streaming pass: heights, shifts, f1, scales, and (optionally) the
/// recursive Nadaraya-Watson shape estimate. Scale and kernel updates use the
/// one-step-lagged shift estimate, the kernel residual uses the one-step-lagged
/// height estimate.
FitResult fit_dataset(const Dataset& data, const DesignDensity& density,
                      const FitOptions& options);

/// Linear interpolation of grid values under period-1 wraparound.
double interp_periodic(const Ref<const Vector>& grid, const Ref<const Vector>& values,
                       double x);

}  // namespace simreg

#endif
