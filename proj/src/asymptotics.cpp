#include "simreg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace simreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double checked_g(double x, const DesignDensity& density) {
  const double g = density(x);
  if (g <= 0.0) raise(Err::ZeroDensity, "design density vanishes at a data point");
  return g;
}

}  // namespace

double normal_quantile(double prob) {
  if (!(prob > 0.0) || !(prob < 1.0))
    raise(Err::InvalidParams, "quantile probability must lie in (0, 1)");
  const bool upper = prob > 0.5;
  const double pv = upper ? 1.0 - prob : prob;
  // Abramowitz-Stegun 26.2.23 seed (|error| < 4.5e-4), then Newton on the
  // exact erfc-based CDF down to machine precision.
  const double t = std::sqrt(-2.0 * std::log(pv));
  double x = -(t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                       (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t));
  if (upper) x = -x;
  for (int it = 0; it < 5; ++it) {
    const double err = norm_cdf(x) - prob;
    x -= err / norm_pdf(x);
  }
  return x;
}

Matrix gamma_v_estimate(const Dataset& data, const DesignDensity& density) {
  const Index n = data.n(), p = data.p();
  if (n < 2) raise(Err::InsufficientData, "covariance estimate needs n >= 2");
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i) z.row(i) = data.y.row(i) / checked_g(data.x[i], density);
  const Vector mean = z.colwise().mean();
  z.rowwise() -= mean.transpose();
  return z.transpose() * z / static_cast<double>(n - 1);
}

Matrix phi_theta_estimate(const Dataset& data, const Ref<const Vector>& theta_hat,
                          const Ref<const Vector>& signs, const DesignDensity& density) {
  const Index n = data.n(), p = data.p();
  if (n < 2) raise(Err::InsufficientData, "phi estimate needs n >= 2");
  if (theta_hat.size() != p || signs.size() != p)
    raise(Err::InvalidParams, "theta_hat and signs must have one entry per curve");
  Matrix acc = Matrix::Zero(p, p);
  Vector v(p);
  for (Index i = 0; i < n; ++i) {
    const double g = checked_g(data.x[i], density);
    for (Index j = 0; j < p; ++j)
      v[j] = signs[j] * std::sin(kTwoPi * (data.x[i] - theta_hat[j])) * data.y(i, j) / g;
    acc.noalias() += v * v.transpose();
  }
  return acc / static_cast<double>(n);
}

Matrix sigma_theta_from_phi(const Ref<const Matrix>& phi, const Ref<const Vector>& a,
                            double f1) {
  const Index p = a.size();
  if (phi.rows() != p || phi.cols() != p)
    raise(Err::InvalidParams, "phi must be p x p");
  const double stability = 2.0 * kTwoPi * std::abs(f1) * a.cwiseAbs().minCoeff();
  if (!(stability > 1.0))
    raise(Err::StabilityConditionViolated,
          "4 pi |f1| min|a_j| = " + std::to_string(stability) + " but must exceed 1");
  Matrix sigma(p, p);
  for (Index k = 0; k < p; ++k)
    for (Index l = 0; l < p; ++l)
      sigma(k, l) =
          phi(k, l) / (kTwoPi * (std::abs(a[k]) + std::abs(a[l])) * std::abs(f1) - 1.0);
  return sigma;
}

std::pair<Matrix, Matrix> gamma_a_estimate(const Dataset& data,
                                           const Ref<const Vector>& theta_hat, double f1,
                                           const Ref<const Vector>& a_hat,
                                           const DesignDensity& density) {
  const Index n = data.n(), p = data.p();
  if (n < 2) raise(Err::InsufficientData, "covariance estimate needs n >= 2");
  if (f1 == 0.0) raise(Err::ZeroArgument, "Gamma(a) needs f1 != 0");
  if (theta_hat.size() != p || a_hat.size() != p)
    raise(Err::InvalidParams, "theta_hat and a_hat must have one entry per curve");
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i) {
    const double g = checked_g(data.x[i], density);
    for (Index j = 0; j < p; ++j)
      z(i, j) = std::cos(kTwoPi * (data.x[i] - theta_hat[j])) * data.y(i, j) / g;
  }
  const Vector mean = z.colwise().mean();
  z.rowwise() -= mean.transpose();
  Matrix gamma = z.transpose() * z / (static_cast<double>(n - 1) * f1 * f1);
  Matrix m = Matrix::Identity(p, p);
  m.col(0) -= a_hat;
  Matrix tilde = m * gamma * m.transpose();
  return {std::move(gamma), std::move(tilde)};
}

std::vector<Interval> ci_param(const Ref<const Vector>& estimate, const Ref<const Matrix>& cov,
                               Index n, double level) {
  if (!(level > 0.0) || !(level < 1.0)) raise(Err::InvalidParams, "level must lie in (0, 1)");
  if (n < 1) raise(Err::InsufficientData, "interval needs n >= 1");
  const Index p = estimate.size();
  if (cov.rows() != p || cov.cols() != p) raise(Err::InvalidParams, "cov must be p x p");
  const double q = normal_quantile(0.5 * (1.0 + level));
  std::vector<Interval> out(p);
  for (Index j = 0; j < p; ++j) {
    const double var = cov(j, j);
    if (var < 0.0) raise(Err::NegativeVariance, "covariance diagonal must be nonnegative");
    const double half = q * std::sqrt(var / static_cast<double>(n));
    out[j] = Interval{estimate[j] - half, estimate[j] + half, level};
  }
  return out;
}

Vector rice_sigma2(const Dataset& data) {
  const Index n = data.n(), p = data.p();
  if (n < 2) raise(Err::InsufficientData, "noise estimate needs n >= 2");
  std::vector<Index> order(n);
  for (Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&data](Index a, Index b) { return data.x[a] < data.x[b]; });
  Vector acc = Vector::Zero(p);
  for (Index i = 0; i + 1 < n; ++i) {
    const auto d = data.y.row(order[i + 1]) - data.y.row(order[i]);
    acc += d.cwiseProduct(d).transpose();
  }
  return acc / (2.0 * static_cast<double>(n - 1));
}

double nw_variance(double x, double alpha, double nu2, const Ref<const Vector>& weights,
                   const ModelParams& params, const Ref<const Vector>& sigma,
                   const DesignDensity& density) {
  if (!(alpha > 1.0 / 3.0))
    raise(Err::AlphaTooSmall, "the shape CLT needs alpha > 1/3");
  const Index p = params.p();
  if (weights.size() != p || sigma.size() != p)
    raise(Err::InvalidParams, "weights and sigma must have one entry per curve");
  if ((sigma.array() <= 0.0).any())
    raise(Err::InvalidParams, "noise standard deviations must be positive");
  Vector gden(p);
  double wsum = 0.0;
  for (Index j = 0; j < p; ++j) {
    gden[j] = (x == 0.0) ? density(params.theta[j])
                         : density(params.theta[j] + x) + density(params.theta[j] - x);
    if (gden[j] > 0.0) wsum += weights[j];
  }
  if (wsum <= 0.0)
    raise(Err::ZeroDensityAtShiftedPoint, "no curve keeps density mass at this x");
  double acc = 0.0;
  for (Index j = 0; j < p; ++j) {
    if (gden[j] <= 0.0) continue;
    if (params.a[j] == 0.0) raise(Err::InvalidParams, "scales must be nonzero");
    const double w = weights[j] / wsum;
    acc += sigma[j] * sigma[j] * w * w / (params.a[j] * params.a[j] * gden[j]);
  }
  return nu2 / (1.0 + alpha) * acc;
}

Interval ci_shape(double f_hat, double variance, Index n, double alpha, double level) {
  if (variance < 0.0) raise(Err::NegativeVariance, "variance must be nonnegative");
  if (!(level > 0.0) || !(level < 1.0)) raise(Err::InvalidParams, "level must lie in (0, 1)");
  const double q = normal_quantile(0.5 * (1.0 + level));
  const double nh = std::pow(static_cast<double>(n), 1.0 - alpha);
  const double half = q * std::sqrt(variance) / std::sqrt(nh);
  return Interval{f_hat - half, f_hat + half, level};
}

Matrix qsl_diagnostic(const std::vector<Vector>& trajectory, const Ref<const Vector>& target) {
  if (trajectory.size() < 2) raise(Err::InsufficientData, "QSL needs a trajectory of length >= 2");
  QslAccumulator acc{Vector(target)};
  for (const Vector& est : trajectory) acc.add(est);
  return acc.value();
}

Matrix QslAccumulator::value() const {
  if (n_ < 2) raise(Err::InsufficientData, "QSL needs at least two estimates");
  return sum_ / std::log(static_cast<double>(n_));
}

}  // namespace simreg
