#ifndef SIMREG_ASYMPTOTICS_HPP
#define SIMREG_ASYMPTOTICS_HPP

#include <utility>
#include <vector>

#include "simreg/core.hpp"
#include "simreg/model.hpp"

namespace simreg {

/// Standard normal quantile. Rational initial guess polished by Newton steps
/// on erfc; accurate to well below 1e-9.
double normal_quantile(double prob);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;

  double length() const noexcept { return hi - lo; }
};

/// Empirical covariance of the vectors Y_i / g(X_i); the height CLT matrix.
Matrix gamma_v_estimate(const Dataset& data, const DesignDensity& density);

/// Empirical mean of V_i V_i^T with V_i = diag(signs) D(X_i, theta_hat) Y_i;
/// the shift-innovation second-moment matrix.
Matrix phi_theta_estimate(const Dataset& data, const Ref<const Vector>& theta_hat,
                          const Ref<const Vector>& signs, const DesignDensity& density);

/// Shift CLT covariance: Sigma_kl = phi_kl / (2 pi (|a_k| + |a_l|) |f1| - 1).
/// Requires the stability condition 4 pi |f1| min_j |a_j| > 1.
Matrix sigma_theta_from_phi(const Ref<const Matrix>& phi, const Ref<const Vector>& a,
                            double f1);

/// Scale CLT covariances: Gamma(a) = Cov(C(X, theta_hat) Y) / f1^2 and the
/// estimated-f1 variant M_p Gamma(a) M_p^T with M_p = I - a_hat e_1^T.
std::pair<Matrix, Matrix> gamma_a_estimate(const Dataset& data,
                                           const Ref<const Vector>& theta_hat, double f1,
                                           const Ref<const Vector>& a_hat,
                                           const DesignDensity& density);

/// Componentwise normal confidence intervals estimate_j -+ q sqrt(cov_jj / n).
std::vector<Interval> ci_param(const Ref<const Vector>& estimate, const Ref<const Matrix>& cov,
                               Index n, double level);

/// First-difference (Rice) noise variance estimate per curve: observations are
/// ordered by x and sigma_j^2 = sum (Y_(i+1),j - Y_(i),j)^2 / (2(n-1)). The
/// smooth signal cancels in neighboring differences, so the estimate does not
/// depend on any fitted quantity.
Vector rice_sigma2(const Dataset& data);

/// Pointwise asymptotic variance of the weighted symmetrized NW estimator.
/// x = 0 uses the single-density form; curves whose g(theta_j +- x) mirror sum
/// vanishes are dropped with weight renormalization.
double nw_variance(double x, double alpha, double nu2, const Ref<const Vector>& weights,
                   const ModelParams& params, const Ref<const Vector>& sigma,
                   const DesignDensity& density);

/// Shape confidence interval f_hat -+ q sqrt(variance) / sqrt(n h_n), h_n = n^-alpha.
Interval ci_shape(double f_hat, double variance, Index n, double alpha, double level);

/// Quadratic-strong-law diagnostic (1 / log n) sum_i (est_i - target)(est_i - target)^T.
Matrix qsl_diagnostic(const std::vector<Vector>& trajectory, const Ref<const Vector>& target);

/// Streaming accumulator for the same diagnostic.
class QslAccumulator {
public:
  explicit QslAccumulator(Vector target)
      : target_(std::move(target)), sum_(Matrix::Zero(target_.size(), target_.size())) {}

  void add(const Ref<const Vector>& estimate) {
    const Vector e = estimate - target_;
    sum_.noalias() += e * e.transpose();
    ++n_;
  }

  Index n() const noexcept { return n_; }
  Matrix value() const;

private:
  Vector target_;
  Matrix sum_;
  Index n_ = 0;
};

struct CovarianceReport {
  Matrix gamma_v;
  Matrix sigma_theta;
  Matrix gamma_a;
  Matrix gamma_a_tilde;
  Index sample_n = 0;
  double level = 0.95;
  std::vector<Interval> ci_v;
  std::vector<Interval> ci_theta;
  std::vector<Interval> ci_a;
};

}  // namespace simreg

#endif
