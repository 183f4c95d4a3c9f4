#include "simreg/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace simreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce x into [-1/2, 1/2) under period 1.
double reduce_period(double x) { return x - std::floor(x + 0.5); }

struct SimpsonCtx {
  const std::function<double(double)>& f;
  int max_depth;
};

double simpson_rec(const SimpsonCtx& ctx, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = ctx.f(lm);
  const double frm = ctx.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= ctx.max_depth)
    raise(Err::QuadratureFailure, "adaptive Simpson depth exhausted");
  return simpson_rec(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol,
                 int max_depth) {
  if (!(hi > lo)) return 0.0;
  SimpsonCtx ctx{f, max_depth};
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo), fm = f(m), fb = f(hi);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(ctx, lo, hi, fa, fm, fb, whole, tol, 0);
}

ShapeSpec ShapeSpec::fourier_cosine(Vector coeffs) {
  ShapeSpec s;
  s.fourier_ = true;
  s.symmetric_ = true;
  s.data_ = std::move(coeffs);
  s.f1_ = s.data_.size() >= 1 ? 0.5 * s.data_[0] : 0.0;
  s.g1_ = 0.0;
  return s;
}

ShapeSpec ShapeSpec::tabulated(Vector values, bool symmetric) {
  if (values.size() < 256)
    raise(Err::InvalidParams, "tabulated shape needs at least 256 grid points");
  const double scale = values.cwiseAbs().maxCoeff();
  const double mean = values.mean();
  if (scale > 0.0 && std::abs(mean) > 1e-6 * scale)
    raise(Err::InvalidParams, "tabulated shape must have zero mean over the period");
  ShapeSpec s;
  s.fourier_ = false;
  s.symmetric_ = symmetric;
  s.data_ = std::move(values);
  s.f1_ = quadrature_f1([&s](double x) { return s(x); });
  s.g1_ = symmetric ? 0.0 : quadrature_g1([&s](double x) { return s(x); });
  return s;
}

double ShapeSpec::operator()(double x) const {
  if (fourier_) {
    double acc = 0.0;
    for (Index k = 0; k < data_.size(); ++k)
      acc += data_[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * x);
    return acc;
  }
  const double u = reduce_period(x);
  const Index m = data_.size();
  const double t = (u + 0.5) * static_cast<double>(m);
  Index i0 = static_cast<Index>(std::floor(t));
  if (i0 >= m) i0 = m - 1;  // guards the u -> 1/2 rounding edge
  const double frac = t - static_cast<double>(i0);
  const double a = data_[i0];
  const double b = data_[(i0 + 1) % m];
  return a + frac * (b - a);
}

double fourier_f1(const ShapeSpec& spec) {
  if (spec.is_fourier()) return spec.data().size() >= 1 ? 0.5 * spec.data()[0] : 0.0;
  return quadrature_f1([&spec](double x) { return spec(x); });
}

double fourier_g1(const ShapeSpec& spec) {
  if (spec.is_fourier()) return 0.0;
  return quadrature_g1([&spec](double x) { return spec(x); });
}

double quadrature_f1(const std::function<double(double)>& f, double tol) {
  return integrate([&f](double x) { return std::cos(kTwoPi * x) * f(x); }, -0.5, 0.5, tol);
}

double quadrature_g1(const std::function<double(double)>& f, double tol) {
  return integrate([&f](double x) { return std::sin(kTwoPi * x) * f(x); }, -0.5, 0.5, tol);
}

DesignDensity DesignDensity::uniform() {
  DesignDensity d;
  d.uniform_ = true;
  d.envelope_ = 1.0;
  return d;
}

DesignDensity DesignDensity::custom(std::function<double(double)> pdf,
                                    std::function<double(double)> inverse_cdf) {
  DesignDensity d;
  d.uniform_ = false;
  d.pdf_ = std::move(pdf);
  d.icdf_ = std::move(inverse_cdf);
  const int grid = 10000;
  double sup = 0.0;
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double x = support_lo + (support_hi - support_lo) * i / grid;
    const double g = d.pdf_(x);
    sup = std::max(sup, g);
    inf = std::min(inf, g);
  }
  if (!(inf > 0.0)) raise(Err::InvalidParams, "density must be positive on its support");
  const double mass = integrate(d.pdf_, support_lo, support_hi, 1e-10);
  if (std::abs(mass - 1.0) > 1e-8)
    raise(Err::InvalidParams, "density must integrate to 1 over [-1/2, 1/2]");
  d.envelope_ = sup;
  return d;
}

double DesignDensity::operator()(double x) const {
  if (x < support_lo || x > support_hi) return 0.0;
  return uniform_ ? 1.0 : pdf_(x);
}

double DesignDensity::sample(CounterRng& rng) const {
  if (uniform_) return support_lo + rng.next_double() * (support_hi - support_lo);
  if (icdf_) return icdf_(rng.next_double());
  for (;;) {
    const double x = support_lo + rng.next_double() * (support_hi - support_lo);
    if (rng.next_double() * envelope_ <= pdf_(x)) return x;
  }
}

ValidationResult validate_identifiability(const ModelParams& params, const ShapeSpec& spec) {
  ValidationResult r;
  auto reject = [&r](Err code, std::string detail) {
    r.ok = false;
    r.violation = code;
    r.detail = std::move(detail);
    return r;
  };
  const Index p = params.p();
  if (p < 1 || params.theta.size() != p || params.a.size() != p)
    return reject(Err::InvalidParams, "v, theta, a must share one length p >= 1");
  if (params.a[0] != 1.0 || params.theta[0] != 0.0)
    return reject(Err::FirstCurveNotReference, "first curve must have a = 1 and theta = 0");
  if (params.theta.cwiseAbs().maxCoeff() >= 0.25)
    return reject(Err::ShiftOutOfRange, "max_j |theta_j| must stay below 1/4");
  for (Index j = 0; j < p; ++j)
    if (params.a[j] == 0.0) return reject(Err::ZeroScale, "scale a_j must be nonzero");
  if (std::abs(spec.f1()) <= 1e-12)
    return reject(Err::ZeroFirstFourier, "shape must have a nonzero first Fourier coefficient");
  return r;
}

Dataset simulate(const ModelParams& params, const ShapeSpec& spec, const DesignDensity& density,
                 const Vector& sigma, Index n, std::uint64_t seed, NoiseKind noise) {
  const ValidationResult val = validate_identifiability(params, spec);
  if (!val) raise(Err::InvalidParams, "model not identifiable (" + val.detail + ")");
  const Index p = params.p();
  if (sigma.size() != p || (sigma.array() < 0.0).any())
    raise(Err::InvalidParams, "sigma must hold p nonnegative standard deviations");

  Dataset data;
  data.x.resize(n);
  data.y.resize(n, p);
  data.sigma = sigma;

  CounterRng xrng(seed, 0);
  std::vector<CounterRng> erng;
  erng.reserve(p);
  for (Index j = 0; j < p; ++j) erng.emplace_back(seed, static_cast<std::uint64_t>(1 + j));

  for (Index i = 0; i < n; ++i) {
    const double x = density.sample(xrng);
    data.x[i] = x;
    for (Index j = 0; j < p; ++j) {
      double eps = 0.0;
      if (sigma[j] > 0.0) {
        switch (noise) {
          case NoiseKind::Gaussian:
            eps = sigma[j] * erng[j].normal();
            break;
          case NoiseKind::Laplace: {
            const double u = erng[j].next_double() - 0.5;
            const double b = sigma[j] / std::numbers::sqrt2;
            eps = -b * (u < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
            break;
          }
        }
      }
      data.y(i, j) = params.a[j] * spec(x - params.theta[j]) + params.v[j] + eps;
    }
  }
  return data;
}

const char* err_name(Err e) noexcept {
  switch (e) {
    case Err::ShiftOutOfRange: return "ShiftOutOfRange";
    case Err::FirstCurveNotReference: return "FirstCurveNotReference";
    case Err::ZeroScale: return "ZeroScale";
    case Err::ZeroFirstFourier: return "ZeroFirstFourier";
    case Err::InvalidParams: return "InvalidParams";
    case Err::ZeroArgument: return "ZeroArgument";
    case Err::MissingCoefficients: return "MissingCoefficients";
    case Err::WrongMode: return "WrongMode";
    case Err::AlphaTooSmall: return "AlphaTooSmall";
    case Err::ConfigError: return "ConfigError";
    case Err::QuadratureFailure: return "QuadratureFailure";
    case Err::ZeroDensity: return "ZeroDensity";
    case Err::DegenerateF1: return "DegenerateF1";
    case Err::OutOfOrderUpdate: return "OutOfOrderUpdate";
    case Err::Unavailable: return "Unavailable";
    case Err::ZeroScaleEstimate: return "ZeroScaleEstimate";
    case Err::StabilityConditionViolated: return "StabilityConditionViolated";
    case Err::NegativeVariance: return "NegativeVariance";
    case Err::ZeroDensityAtShiftedPoint: return "ZeroDensityAtShiftedPoint";
    case Err::DegenerateWeights: return "DegenerateWeights";
    case Err::InsufficientData: return "InsufficientData";
    case Err::NoBeatsDetected: return "NoBeatsDetected";
    case Err::SignalTooShort: return "SignalTooShort";
    case Err::ParseError: return "ParseError";
    case Err::FileError: return "FileError";
  }
  return "UnknownError";
}

}  // namespace simreg
