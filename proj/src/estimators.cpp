#include "simreg/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace simreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double checked_density(double x, const DesignDensity& density) {
  const double g = density(x);
  if (g <= std::numeric_limits<double>::epsilon())
    raise(Err::ZeroDensity, "design density vanishes at the observation point");
  return g;
}

}  // namespace

Vector rm_innovation(double x, const Ref<const Vector>& y_row,
                     const Ref<const Vector>& theta_hat, const DesignDensity& density,
                     std::optional<std::pair<double, double>> fourier) {
  const double g = checked_density(x, density);
  const Index p = y_row.size();
  Vector t(p);
  if (!fourier) {
    for (Index j = 0; j < p; ++j)
      t[j] = std::sin(kTwoPi * (x - theta_hat[j])) * y_row[j] / g;
  } else {
    const auto [f1, g1] = *fourier;
    for (Index j = 0; j < p; ++j) {
      const double arg = kTwoPi * (x - theta_hat[j]);
      t[j] = (f1 * std::sin(arg) - g1 * std::cos(arg)) * y_row[j] / g;
    }
  }
  return t;
}

Vector efficient_gains(double f1, const Ref<const Vector>& a) {
  if (f1 == 0.0) raise(Err::ZeroArgument, "efficient gains need f1 != 0");
  Vector g(a.size());
  for (Index j = 0; j < a.size(); ++j) {
    if (a[j] == 0.0) raise(Err::ZeroArgument, "efficient gains need a_j != 0");
    g[j] = 1.0 / (kTwoPi * a[j] * f1);
  }
  return g;
}

void HeightState::update(double x, const Ref<const Vector>& y_row,
                         const DesignDensity& density) {
  const double g = checked_density(x, density);
  sum_ += y_row / g;
  ++n_;
  if (record_) trajectory_.push_back(estimate());
}

Vector HeightState::estimate() const {
  if (n_ < 1) raise(Err::InsufficientData, "height estimate needs at least one observation");
  return sum_ / static_cast<double>(n_);
}

RMState::RMState(Index p, RMOptions options) : opt_(std::move(options)) {
  Vector theta0 = opt_.theta0.size() ? opt_.theta0 : Vector::Zero(p);
  if (theta0.size() != p || theta0.cwiseAbs().maxCoeff() > 0.25)
    raise(Err::InvalidParams, "theta0 must lie in K^p");
  if (opt_.sign_mode == SignMode::Known) {
    if (opt_.signs.size() != p) raise(Err::InvalidParams, "Known mode needs p signs");
    for (Index j = 0; j < p; ++j)
      if (opt_.signs[j] != 1.0 && opt_.signs[j] != -1.0)
        raise(Err::InvalidParams, "signs must be +1 or -1");
  }
  if (opt_.gain_scale.size() && opt_.gain_scale.size() != p)
    raise(Err::InvalidParams, "gain_scale must have one entry per curve");
  if (opt_.gain_scale.size() && (opt_.gain_scale.array() <= 0.0).any())
    raise(Err::InvalidParams, "gain scales must be positive");
  if (!opt_.symmetric && opt_.f1 == 0.0 && opt_.g1 == 0.0)
    raise(Err::MissingCoefficients, "non-symmetric mode needs (f1, g1)");
  theta_ = theta0;
  theta_plus_ = theta0;
  theta_minus_ = theta0;
  trunc_ = Eigen::ArrayXi::Zero(p);
  trunc_plus_ = Eigen::ArrayXi::Zero(p);
  trunc_minus_ = Eigen::ArrayXi::Zero(p);
}

double RMState::gain(Index j, Index n_next) const {
  const double c = opt_.gain_scale.size() ? opt_.gain_scale[j] : 1.0;
  return c / static_cast<double>(n_next);
}

void RMState::step(double x, const Ref<const Vector>& y_row, const DesignDensity& density) {
  const Index p = theta_.size();
  const std::optional<std::pair<double, double>> fourier =
      opt_.symmetric ? std::nullopt
                     : std::optional<std::pair<double, double>>({opt_.f1, opt_.g1});
  const Index n_next = n_ + 1;

  auto advance = [&](Vector& theta, Eigen::ArrayXi& trunc, double direction,
                     const Vector* signs) {
    const Vector t = rm_innovation(x, y_row, theta, density, fourier);
    for (Index j = 0; j < p; ++j) {
      const double s = signs ? (*signs)[j] : direction;
      const double cand = theta[j] + gain(j, n_next) * s * t[j];
      const double proj = rm_project(cand);
      if (proj != cand) ++trunc[j];
      theta[j] = proj;
    }
  };

  if (opt_.sign_mode == SignMode::Known) {
    advance(theta_, trunc_, 0.0, &opt_.signs);
  } else {
    advance(theta_plus_, trunc_plus_, 1.0, nullptr);
    advance(theta_minus_, trunc_minus_, -1.0, nullptr);
  }
  n_ = n_next;
}

Vector RMState::estimate() const {
  return opt_.sign_mode == SignMode::Known ? theta_ : dual_select();
}

Vector dual_select(const Ref<const Vector>& plus, const Ref<const Vector>& minus) {
  if (plus.size() != minus.size())
    raise(Err::InvalidParams, "chains must have equal length");
  Vector out(plus.size());
  for (Index j = 0; j < plus.size(); ++j)
    out[j] = std::abs(plus[j]) <= std::abs(minus[j]) ? plus[j] : minus[j];
  return out;
}

Vector RMState::dual_select() const {
  if (opt_.sign_mode != SignMode::DualRun)
    raise(Err::WrongMode, "dual_select needs DualRun mode");
  return simreg::dual_select(theta_plus_, theta_minus_);
}

const Vector& RMState::chain() const {
  if (opt_.sign_mode != SignMode::Known) raise(Err::WrongMode, "chain() needs Known mode");
  return theta_;
}

const Vector& RMState::chain_plus() const {
  if (opt_.sign_mode != SignMode::DualRun)
    raise(Err::WrongMode, "chain_plus() needs DualRun mode");
  return theta_plus_;
}

const Vector& RMState::chain_minus() const {
  if (opt_.sign_mode != SignMode::DualRun)
    raise(Err::WrongMode, "chain_minus() needs DualRun mode");
  return theta_minus_;
}

Eigen::ArrayXi RMState::truncation_count() const {
  if (opt_.sign_mode == SignMode::Known) return trunc_;
  const Index p = theta_plus_.size();
  Eigen::ArrayXi out(p);
  for (Index j = 0; j < p; ++j)
    out[j] = std::abs(theta_plus_[j]) <= std::abs(theta_minus_[j]) ? trunc_plus_[j]
                                                                   : trunc_minus_[j];
  return out;
}

void F1State::update(double x, const Ref<const Vector>& y_row, const DesignDensity& density) {
  const double g = checked_density(x, density);
  sum_ += std::cos(kTwoPi * x) * y_row[0] / g;
  ++n_;
}

double F1State::estimate() const {
  if (n_ < 1) raise(Err::InsufficientData, "f1 estimate needs at least one observation");
  return sum_ / static_cast<double>(n_);
}

void ScaleState::update(double x, const Ref<const Vector>& y_row,
                        const Ref<const Vector>& theta_prev, const DesignDensity& density) {
  const double g = checked_density(x, density);
  for (Index j = 0; j < cos_sum_.size(); ++j)
    cos_sum_[j] += std::cos(kTwoPi * (x - theta_prev[j])) * y_row[j] / g;
  ++n_;
}

std::optional<Vector> ScaleState::estimate(double f1) const {
  if (n_ < 1) raise(Err::InsufficientData, "scale estimate needs at least one observation");
  if (std::abs(f1) < 1e-8) return std::nullopt;
  return Vector(cos_sum_ / (static_cast<double>(n_) * f1));
}

}  // namespace simreg
