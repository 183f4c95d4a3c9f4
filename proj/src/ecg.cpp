#include "simreg/ecg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "simreg/estimators.hpp"
#include "simreg/fit.hpp"
#include "simreg/rng.hpp"

namespace simreg::ecg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Index> detect_maxima(const std::vector<double>& s, Index min_separation,
                                 double threshold) {
  std::vector<Index> peaks;
  const Index n = static_cast<Index>(s.size());
  for (Index t = 1; t + 1 < n; ++t) {
    if (s[t] < threshold || s[t] <= s[t - 1] || s[t] < s[t + 1]) continue;
    if (!peaks.empty() && t - peaks.back() < min_separation) {
      if (s[t] > s[peaks.back()]) peaks.back() = t;  // keep the taller one
      continue;
    }
    peaks.push_back(t);
  }
  return peaks;
}

}  // namespace

double default_threshold(const Signal& signal) {
  if (signal.samples.empty()) raise(Err::SignalTooShort, "signal is empty");
  return 0.6 * *std::max_element(signal.samples.begin(), signal.samples.end());
}

SegmentedBeats segment(const Signal& signal, Index min_separation, double threshold) {
  if (min_separation < 1) raise(Err::InvalidParams, "min_separation must be >= 1");
  const auto peaks = detect_maxima(signal.samples, min_separation, threshold);
  if (peaks.empty()) raise(Err::NoBeatsDetected, "no local maximum above the threshold");
  if (peaks.size() < 2)
    raise(Err::SignalTooShort, "need at least two detected maxima to size the beats");

  Index gap = std::numeric_limits<Index>::max();
  for (std::size_t m = 1; m < peaks.size(); ++m) gap = std::min(gap, peaks[m] - peaks[m - 1]);
  Index len = gap % 2 == 0 ? gap - 1 : gap;  // odd length centers the maximum
  if (len < 3) raise(Err::SignalTooShort, "inter-beat gap too small for a window");
  const Index half = len / 2;

  std::vector<Index> starts;
  for (Index m : peaks) {
    if (m < half) continue;
    const Index start = m - half;
    if (start + len > static_cast<Index>(signal.samples.size())) continue;
    starts.push_back(start);
  }
  if (starts.empty()) raise(Err::SignalTooShort, "every window leaves the signal");

  SegmentedBeats out;
  out.beats.resize(static_cast<Index>(starts.size()), len);
  for (Index b = 0; b < out.p(); ++b)
    for (Index i = 0; i < len; ++i) out.beats(b, i) = signal.samples[starts[b] + i];
  out.xgrid.resize(len);
  for (Index i = 0; i < len; ++i)
    out.xgrid[i] = -0.5 + (static_cast<double>(i) + 0.5) / static_cast<double>(len);
  return out;
}

FittedModel fit_with_reference(const SegmentedBeats& beats, Index ref,
                               const EcgFitOptions& options) {
  const Index p = beats.p(), n = beats.n();
  if (p < 1 || n < 2) raise(Err::InsufficientData, "beats matrix is empty");
  if (ref < 0 || ref >= p) raise(Err::InvalidParams, "reference index out of range");

  // Reference first, everyone else in original order.
  std::vector<Index> perm;
  perm.reserve(p);
  perm.push_back(ref);
  for (Index j = 0; j < p; ++j)
    if (j != ref) perm.push_back(j);

  // scalar per-row means: a row's mean must not depend on its position in the
  // matrix (packet/tail reductions differ in the last ulp)
  Vector means(p);
  for (Index j = 0; j < p; ++j) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += beats.beats(j, i);
    means[j] = acc / static_cast<double>(n);
  }
  Matrix centered(p, n);
  for (Index j = 0; j < p; ++j)
    centered.row(j) = beats.beats.row(perm[j]).array() - means[perm[j]];

  // First Fourier coefficients of the reference curve; the midpoint grid makes
  // the empirical cos/sin projections exact for band-limited shapes.
  double f1 = 0.0, g1 = 0.0;
  for (Index i = 0; i < n; ++i) {
    f1 += std::cos(kTwoPi * beats.xgrid[i]) * centered(0, i);
    g1 += std::sin(kTwoPi * beats.xgrid[i]) * centered(0, i);
  }
  f1 /= static_cast<double>(n);
  g1 /= static_cast<double>(n);
  if (std::abs(f1) < 1e-8)
    raise(Err::DegenerateF1, "reference curve has no usable first cosine harmonic");

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  CounterRng rng(options.shuffle_seed, 0);
  for (Index i = n - 1; i > 0; --i) {
    const Index k = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[k]);
  }

  const DesignDensity density = DesignDensity::uniform();
  RMOptions rm;
  rm.sign_mode = SignMode::DualRun;
  rm.symmetric = false;
  rm.f1 = f1;
  rm.g1 = g1;
  // The mean field of the delta innovation has slope 2 pi (f1^2 + g1^2) a_j
  // at the root; ECG templates carry modest first harmonics, so rescale the
  // 1/n gain the same way the efficient-gain variant does, within bounds.
  const double slope = kTwoPi * (f1 * f1 + g1 * g1);
  rm.gain_scale = Vector::Constant(
      p, std::clamp(options.gain_scale > 0.0 ? options.gain_scale : 1.0 / slope, 1.0, 100.0));

  HeightState height(p);
  RMState shifts(p, rm);
  ScaleState scales(p);
  NWConfig nwcfg;
  nwcfg.alpha = options.alpha;
  if (!(options.grid_margin >= 0.0) || options.grid_margin >= 0.5)
    raise(Err::InvalidParams, "grid margin must lie in [0, 1/2)");
  nwcfg.grid = linspace(-0.5 + options.grid_margin, 0.5 - options.grid_margin,
                        options.grid_points);
  nwcfg.symmetrize = false;
  NWState nw(nwcfg, p);

  Vector theta_prev = Vector::Zero(p);
  Vector v_prev = Vector::Zero(p);
  for (Index step = 0; step < n; ++step) {
    const Index i = order[step];
    const double x = beats.xgrid[i];
    const Vector y_row = centered.col(i);
    scales.update(x, y_row, theta_prev, density);
    nw.update(step + 1, x, y_row, theta_prev, v_prev);
    height.update(x, y_row, density);
    shifts.step(x, y_row, density);
    theta_prev = shifts.estimate();
    theta_prev[0] = 0.0;  // reference convention
    v_prev = height.estimate();
  }

  Vector theta = shifts.estimate();
  theta[0] = 0.0;
  auto a = scales.estimate(f1);
  if (!a) raise(Err::DegenerateF1, "scale estimate unavailable");
  (*a)[0] = 1.0;
  const Vector v = height.estimate();

  FittedModel fit;
  fit.ref = ref;
  fit.f1_hat = f1;
  fit.g1_hat = g1;
  fit.grid = nwcfg.grid;
  fit.f_values = Vector::Constant(nwcfg.grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (Index k = 0; k < nwcfg.grid.size(); ++k)
    if (auto val = nw.evaluate(k, *a)) fit.f_values[k] = *val;

  fit.v_hat.resize(p);
  fit.theta_hat.resize(p);
  fit.a_hat.resize(p);
  for (Index pos = 0; pos < p; ++pos) {
    const Index j = perm[pos];
    fit.v_hat[j] = v[pos] + means[j];
    fit.theta_hat[j] = theta[pos];
    fit.a_hat[j] = (*a)[pos];
  }
  return fit;
}

Vector residual_variance(const SegmentedBeats& beats, const FittedModel& fit) {
  const Index p = beats.p(), n = beats.n();
  Vector acc = Vector::Zero(p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) {
      const double r = beats.beats(j, i) - reconstruct(fit, j, beats.xgrid[i]);
      acc[j] += r * r;
    }
  return acc / static_cast<double>(n);
}

ReferenceSelection select_reference(const SegmentedBeats& beats, const EcgFitOptions& options) {
  const Index p = beats.p();
  if (p < 1) raise(Err::InsufficientData, "no beats to select from");
  ReferenceSelection sel;
  sel.scores.resize(p);
  for (Index r = 0; r < p; ++r) {
    const FittedModel fit = fit_with_reference(beats, r, options);
    sel.scores[r] = residual_variance(beats, fit).sum();
  }
  sel.j_star = 0;
  for (Index r = 1; r < p; ++r)
    if (sel.scores[r] < sel.scores[sel.j_star]) sel.j_star = r;
  return sel;
}

double reconstruct(const FittedModel& fit, Index curve, double x) {
  if (curve < 0 || curve >= fit.v_hat.size())
    raise(Err::InvalidParams, "curve index out of range");
  const double f = interp_periodic(fit.grid, fit.f_values, x - fit.theta_hat[curve]);
  return fit.a_hat[curve] * f + fit.v_hat[curve];
}

}  // namespace simreg::ecg
