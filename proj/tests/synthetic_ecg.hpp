#ifndef SIMREG_TESTS_SYNTHETIC_ECG_HPP
#define SIMREG_TESTS_SYNTHETIC_ECG_HPP

#include <cmath>

#include "simreg/ecg.hpp"
#include "simreg/model.hpp"
#include "simreg/rng.hpp"

namespace simreg::testing {

/// ECG-like template: P wave, QRS spike, T wave, shifted to zero mean over the
/// period. Asymmetric on purpose; the waves decay to a flat baseline well
/// before the beat boundaries.
inline double ecg_template(double x) {
  auto waves = [](double u) {
    auto bump = [](double t, double c, double h, double w) {
      const double z = (t - c) / w;
      return h * std::exp(-0.5 * z * z);
    };
    return bump(u, 0.0, 1.0, 0.06) + bump(u, -0.28, 0.2, 0.04) + bump(u, 0.22, 0.3, 0.05);
  };
  const double u = x - std::floor(x + 0.5);
  static const double mean = integrate(waves, -0.5, 0.5, 1e-12);
  return waves(u) - mean;
}

/// Beats drawn from the deformation model on the midpoint grid: one curve per
/// row, the curve `ref` carrying (v, theta, a) = (0, 0, 1).
inline ecg::SegmentedBeats synthetic_beats(const Vector& v, const Vector& theta,
                                           const Vector& a, Index n, double sigma,
                                           std::uint64_t seed) {
  const Index p = v.size();
  ecg::SegmentedBeats beats;
  beats.beats.resize(p, n);
  beats.xgrid.resize(n);
  for (Index i = 0; i < n; ++i)
    beats.xgrid[i] = -0.5 + (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  CounterRng rng(seed, 7);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) {
      const double noise = sigma > 0.0 ? sigma * rng.normal() : 0.0;
      beats.beats(j, i) = a[j] * ecg_template(beats.xgrid[i] - theta[j]) + v[j] + noise;
    }
  return beats;
}

/// Deformations whose shifts spread beyond 1/4 for every reference except the
/// true one (index 2), so re-referencing breaks the shift constraint.
struct ArrhythmiaSetup {
  Vector v;
  Vector theta;
  Vector a;
  Index true_ref = 2;

  ArrhythmiaSetup() {
    v.resize(5);
    theta.resize(5);
    a.resize(5);
    v << 0.3, -0.2, 0.0, 0.15, -0.1;
    theta << 0.15, -0.14, 0.0, 0.13, -0.12;
    a << 0.8, 1.25, 1.0, 0.9, 1.15;
  }
};

}  // namespace simreg::testing

#endif
