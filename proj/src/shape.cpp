#include "simreg/shape.hpp"

#include <cmath>

namespace simreg {

KernelSpec KernelSpec::uniform() {
  KernelSpec k;
  k.kind_ = Kind::Uniform;
  k.half_width_ = 1.0;
  k.nu2_ = 0.5;
  return k;
}

KernelSpec KernelSpec::epanechnikov() {
  KernelSpec k;
  k.kind_ = Kind::Epanechnikov;
  k.half_width_ = 1.0;
  k.nu2_ = 0.6;
  return k;
}

KernelSpec KernelSpec::table(Vector values, double half_width) {
  if (values.size() < 2 || !(half_width > 0.0))
    raise(Err::InvalidParams, "kernel table needs >= 2 values and a positive half width");
  if ((values.array() < 0.0).any())
    raise(Err::InvalidParams, "kernel must be nonnegative");
  KernelSpec k;
  k.kind_ = Kind::Table;
  k.table_ = std::move(values);
  k.half_width_ = half_width;
  const double mass = integrate([&k](double u) { return k(u); }, -half_width, half_width, 1e-10);
  if (std::abs(mass - 1.0) > 1e-8)
    raise(Err::InvalidParams, "kernel must integrate to 1");
  k.nu2_ = integrate([&k](double u) { return k(u) * k(u); }, -half_width, half_width, 1e-10);
  return k;
}

double KernelSpec::operator()(double u) const {
  const double z = std::abs(u);
  if (z > half_width_) return 0.0;
  switch (kind_) {
    case Kind::Uniform:
      return 0.5;
    case Kind::Epanechnikov:
      return 0.75 * (1.0 - u * u);
    case Kind::Table: {
      // symmetric table over [0, half_width]
      const double t = z / half_width_ * static_cast<double>(table_.size() - 1);
      const Index i0 = std::min<Index>(static_cast<Index>(t), table_.size() - 2);
      const double frac = t - static_cast<double>(i0);
      return table_[i0] + frac * (table_[i0 + 1] - table_[i0]);
    }
  }
  return 0.0;
}

Vector WeightRule::at(double x, Index p) const {
  if (kind == Kind::Uniform) return Vector::Constant(p, 1.0 / static_cast<double>(p));
  Vector w = fn(x);
  if (w.size() != p) raise(Err::InvalidParams, "weight rule returned wrong length");
  return w;
}

Vector weights_optimal(double x, const ModelParams& params, const Ref<const Vector>& sigma,
                       const DesignDensity& density) {
  const Index p = params.p();
  if (sigma.size() != p || (sigma.array() <= 0.0).any())
    raise(Err::InvalidParams, "optimal weights need positive sigma_j");
  Vector m(p);
  for (Index j = 0; j < p; ++j) {
    const double gsum = density(params.theta[j] + x) + density(params.theta[j] - x);
    m[j] = params.a[j] * params.a[j] * gsum / (sigma[j] * sigma[j]);
  }
  const double total = m.sum();
  if (total <= 0.0) raise(Err::DegenerateWeights, "all weight masses vanished");
  return m / total;
}

Vector linspace(double lo, double hi, Index points) {
  if (points < 2 || !(hi > lo)) raise(Err::InvalidParams, "grid needs >= 2 increasing points");
  Vector g(points);
  for (Index k = 0; k < points; ++k)
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  return g;
}

Vector uniform_grid(Index points) { return linspace(-0.5, 0.5, points); }

void NWConfig::validate(Index p) const {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    raise(Err::InvalidParams, "bandwidth exponent alpha must lie in (0, 1)");
  if (grid.size() < 1) raise(Err::InvalidParams, "evaluation grid is empty");
  for (Index k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) raise(Err::InvalidParams, "grid must be strictly sorted");
  if (weights.kind == WeightRule::Kind::Custom) {
    for (Index k = 0; k < grid.size(); ++k) {
      const Vector w = weights.at(grid[k], p);
      const Vector wm = weights.at(-grid[k], p);
      if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > 1e-9 ||
          (w - wm).cwiseAbs().maxCoeff() > 1e-9)
        raise(Err::InvalidParams, "weights must be nonnegative, even in x, and sum to 1");
    }
  }
}

NWState::NWState(NWConfig config, Index p) : cfg_(std::move(config)) {
  cfg_.validate(p);
  num_ = Matrix::Zero(cfg_.grid.size(), p);
  den_ = Matrix::Zero(cfg_.grid.size(), p);
}

void NWState::update(Index i, double x_obs, const Ref<const Vector>& y_row,
                     const Ref<const Vector>& theta_prev, const Ref<const Vector>& v_prev) {
  if (i != n_ + 1) raise(Err::OutOfOrderUpdate, "NW updates must arrive as i = n + 1");
  const Index p = num_.cols();
  const double h = std::pow(static_cast<double>(i), -cfg_.alpha);
  const double reach = h * cfg_.kernel.half_width();
  for (Index j = 0; j < p; ++j) {
    const double center = x_obs - theta_prev[j];
    const double resid = y_row[j] - v_prev[j];
    for (Index k = 0; k < cfg_.grid.size(); ++k) {
      const double x = cfg_.grid[k];
      double w = 0.0;
      if (std::abs(center - x) <= reach) w += cfg_.kernel((center - x) / h);
      if (cfg_.symmetrize && std::abs(center + x) <= reach) w += cfg_.kernel((center + x) / h);
      if (w == 0.0) continue;
      w /= h;
      den_(k, j) += w;
      num_(k, j) += w * resid;
    }
  }
  n_ = i;
}

std::optional<double> NWState::evaluate(Index k, const Ref<const Vector>& a_hat) const {
  const Index p = num_.cols();
  if (a_hat.size() != p) raise(Err::InvalidParams, "a_hat must have one entry per curve");
  Vector w = cfg_.weights.at(cfg_.grid[k], p);
  double wsum = 0.0;
  for (Index j = 0; j < p; ++j)
    if (den_(k, j) > 0.0) wsum += w[j];
  if (wsum == 0.0) return std::nullopt;
  double acc = 0.0;
  for (Index j = 0; j < p; ++j) {
    if (den_(k, j) <= 0.0) continue;
    if (a_hat[j] == 0.0)
      raise(Err::ZeroScaleEstimate, "scale estimate is zero for a contributing curve");
    acc += (w[j] / wsum) * num_(k, j) / (a_hat[j] * den_(k, j));
  }
  return acc;
}

std::optional<double> NWState::evaluate_curve(Index k, Index j, double a_hat_j) const {
  if (den_(k, j) <= 0.0) return std::nullopt;
  if (a_hat_j == 0.0) raise(Err::ZeroScaleEstimate, "scale estimate is zero");
  return num_(k, j) / (a_hat_j * den_(k, j));
}

Index NWState::grid_index(double x, double tol) const {
  const Vector& g = cfg_.grid;
  Index lo = 0, hi = g.size() - 1;
  while (lo < hi) {
    const Index mid = (lo + hi) / 2;
    if (g[mid] < x - tol)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (std::abs(g[lo] - x) <= tol) return lo;
  raise(Err::Unavailable, "x is not an evaluation grid point");
}

}  // namespace simreg
