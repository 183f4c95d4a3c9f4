#include "simreg/fit.hpp"

#include <cmath>
#include <limits>

namespace simreg {

FitResult fit_dataset(const Dataset& data, const DesignDensity& density,
                      const FitOptions& options) {
  const Index n = data.n(), p = data.p();
  if (n < 1) raise(Err::InsufficientData, "fit needs at least one observation");
  if (p < 1) raise(Err::InsufficientData, "fit needs at least one curve");

  RMOptions rm;
  rm.sign_mode = options.sign_mode;
  rm.signs = options.signs;
  rm.gain_scale = options.gain_scale;
  rm.symmetric = options.symmetric;
  if (!options.symmetric) {
    if (!options.fourier)
      raise(Err::MissingCoefficients, "non-symmetric fit needs (f1, g1)");
    rm.f1 = options.fourier->first;
    rm.g1 = options.fourier->second;
  }
  rm.theta0 = options.theta0;

  HeightState height(p);
  RMState shifts(p, rm);
  F1State f1;
  ScaleState scales(p);
  std::optional<NWState> nw;
  if (options.with_shape) nw.emplace(options.nw, p);

  FitResult out;
  if (options.record_trajectories) {
    out.v_trajectory.reserve(n);
    out.theta_trajectory.reserve(n);
  }

  Vector theta_prev = shifts.estimate();
  Vector v_prev = Vector::Zero(p);
  for (Index i = 0; i < n; ++i) {
    const double x = data.x[i];
    const auto y_row = data.y.row(i).transpose();
    scales.update(x, y_row, theta_prev, density);
    if (nw) nw->update(i + 1, x, y_row, theta_prev, v_prev);
    f1.update(x, y_row, density);
    height.update(x, y_row, density);
    shifts.step(x, y_row, density);
    theta_prev = shifts.estimate();
    v_prev = height.estimate();
    if (options.record_trajectories) {
      out.theta_trajectory.push_back(theta_prev);
      out.v_trajectory.push_back(v_prev);
    }
  }

  out.n = n;
  out.v_hat = height.estimate();
  out.theta_hat = shifts.estimate();
  out.f1_hat = f1.estimate();
  out.f1_used = options.f1_known.value_or(out.f1_hat);
  out.truncations = shifts.truncation_count();
  out.a_hat = scales.estimate(out.f1_used);
  if (nw) {
    out.f_grid = Vector::Constant(options.nw.grid.size(),
                                  std::numeric_limits<double>::quiet_NaN());
    if (out.a_hat) {
      for (Index k = 0; k < options.nw.grid.size(); ++k)
        if (auto v = nw->evaluate(k, *out.a_hat)) out.f_grid[k] = *v;
    }
    out.nw = std::move(nw);
  }
  return out;
}

double interp_periodic(const Ref<const Vector>& grid, const Ref<const Vector>& values,
                       double x) {
  const Index m = grid.size();
  if (m < 2 || values.size() != m)
    raise(Err::InvalidParams, "interpolation needs matching grid/value arrays");
  const double lo = grid[0];
  const double span = 1.0;  // period
  double u = x - std::floor((x - lo) / span) * span;  // into [lo, lo + 1)
  // binary search for the cell; the wrap cell closes the period
  Index k = 0, hi = m - 1;
  if (u >= grid[m - 1]) {
    const double gap = lo + span - grid[m - 1];
    const double frac = gap > 0.0 ? (u - grid[m - 1]) / gap : 0.0;
    return values[m - 1] + frac * (values[0] - values[m - 1]);
  }
  while (k + 1 < hi) {
    const Index mid = (k + hi) / 2;
    if (grid[mid] <= u)
      k = mid;
    else
      hi = mid;
  }
  const double gap = grid[k + 1] - grid[k];
  const double frac = gap > 0.0 ? (u - grid[k]) / gap : 0.0;
  return values[k] + frac * (values[k + 1] - values[k]);
}

}  // namespace simreg
