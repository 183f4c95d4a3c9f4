#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "simreg/ecg.hpp"
#include "simreg/fit.hpp"
#include "simreg/rng.hpp"
#include "synthetic_ecg.hpp"

using namespace simreg;
using simreg::testing::ArrhythmiaSetup;
using simreg::testing::ecg_template;
using simreg::testing::synthetic_beats;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// pulse train with period `gap`, peaks at offset + k*gap
ecg::Signal pulse_train(Index n_samples, Index gap, Index offset, double amp = 1.0) {
  ecg::Signal sig;
  sig.samples.assign(n_samples, 0.0);
  for (Index t = offset; t < n_samples; t += gap) {
    for (Index d = -3; d <= 3; ++d) {
      const Index u = t + d;
      if (u >= 0 && u < n_samples)
        sig.samples[u] = std::max(sig.samples[u], amp * (1.0 - std::abs(d) / 4.0));
    }
  }
  return sig;
}

}  // namespace

TEST_CASE("segmentation of an identical pulse train") {
  const ecg::Signal sig = pulse_train(2000, 100, 60);
  const ecg::SegmentedBeats beats = ecg::segment(sig, 40, ecg::default_threshold(sig));
  CHECK(beats.n() == 99);  // min gap 100, reduced to odd
  CHECK(beats.p() >= 18);
  CHECK(beats.p() <= 20);
  for (Index b = 1; b < beats.p(); ++b)
    CHECK((beats.beats.row(b) - beats.beats.row(0)).cwiseAbs().maxCoeff() == 0.0);
  // the detected maximum sits at the window center, x = 0
  Index argmax;
  beats.beats.row(0).maxCoeff(&argmax);
  CHECK(argmax == beats.n() / 2);
  CHECK(beats.xgrid[argmax] == doctest::Approx(0.0));
}

TEST_CASE("segmentation hits the target 18 x 83 layout") {
  // period 84 -> odd window 83; first and last windows leave the signal
  const ecg::Signal sig = pulse_train(1640, 84, 10);
  const ecg::SegmentedBeats beats = ecg::segment(sig, 30, 0.5);
  CHECK(beats.p() == 18);
  CHECK(beats.n() == 83);
}

TEST_CASE("segmentation error paths") {
  ecg::Signal flat;
  flat.samples.assign(500, 0.0);
  CHECK_THROWS_AS(ecg::segment(flat, 10, 0.0), Error);  // no maxima above threshold

  ecg::Signal one = pulse_train(120, 100, 60);
  CHECK_THROWS_AS(ecg::segment(one, 10, 0.5), Error);  // single maximum
}

TEST_CASE("trivial single-beat fit pins the reference") {
  const ecg::SegmentedBeats beats =
      synthetic_beats(vec({0.7}), vec({0.0}), vec({1.0}), 201, 0.0, 11);
  const ecg::FittedModel fit = ecg::fit_with_reference(beats, 0);
  CHECK(fit.a_hat[0] == 1.0);
  CHECK(fit.theta_hat[0] == 0.0);
  CHECK(fit.v_hat[0] == doctest::Approx(beats.beats.row(0).mean()).epsilon(1e-12));
}

TEST_CASE("simulate-then-fit round trip recovers the deformation") {
  const ArrhythmiaSetup s;
  const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 401, 0.02, 21);
  const ecg::FittedModel fit = ecg::fit_with_reference(beats, s.true_ref);
  CHECK((fit.theta_hat - s.theta).cwiseAbs().maxCoeff() < 0.03);
  CHECK((fit.a_hat - s.a).cwiseAbs().maxCoeff() < 0.15);
  CHECK((fit.v_hat - s.v).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("relabeling equivariance: permuting beats permutes the fit") {
  const ArrhythmiaSetup s;
  const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 301, 0.03, 33);

  std::vector<Index> perm = {3, 0, 4, 2, 1};  // new row r holds old row perm[r]
  ecg::SegmentedBeats shuffled;
  shuffled.xgrid = beats.xgrid;
  shuffled.beats.resize(beats.p(), beats.n());
  for (Index r = 0; r < beats.p(); ++r) shuffled.beats.row(r) = beats.beats.row(perm[r]);

  const ecg::FittedModel base = ecg::fit_with_reference(beats, s.true_ref);
  const ecg::FittedModel moved = ecg::fit_with_reference(shuffled, 3);  // old curve 2
  for (Index r = 0; r < beats.p(); ++r) {
    CHECK(moved.v_hat[r] == base.v_hat[perm[r]]);
    CHECK(moved.theta_hat[r] == base.theta_hat[perm[r]]);
    CHECK(moved.a_hat[r] == base.a_hat[perm[r]]);
  }
}

TEST_CASE("residual variance: exact-parameter fit on noiseless beats") {
  const ArrhythmiaSetup s;
  const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 401, 0.0, 5);
  ecg::FittedModel exact;
  exact.ref = s.true_ref;
  exact.v_hat = s.v;
  exact.theta_hat = s.theta;
  exact.a_hat = s.a;
  exact.grid = uniform_grid(101);
  exact.f_values.resize(101);
  for (Index k = 0; k < 101; ++k) exact.f_values[k] = ecg_template(exact.grid[k]);
  const Vector res = ecg::residual_variance(beats, exact);
  CHECK(res.maxCoeff() < 1e-3);  // grid interpolation error only
}

TEST_CASE("residual variance tracks the noise level") {
  const ArrhythmiaSetup s;
  const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 401, 0.5, 77);
  const ecg::FittedModel fit = ecg::fit_with_reference(beats, s.true_ref);
  const Vector res = ecg::residual_variance(beats, fit);
  for (Index j = 0; j < res.size(); ++j) CHECK(res[j] == doctest::Approx(0.25).epsilon(0.2));

  // paired seeds: smaller noise gives smaller residuals componentwise
  const ecg::SegmentedBeats q = synthetic_beats(s.v, s.theta, s.a, 401, 0.1, 77);
  const Vector res_q = ecg::residual_variance(q, ecg::fit_with_reference(q, s.true_ref));
  CHECK((res_q.array() < res.array()).all());

  // zero beats against a zero fit
  ecg::SegmentedBeats zero;
  zero.beats = Matrix::Zero(2, 51);
  zero.xgrid.resize(51);
  for (Index i = 0; i < 51; ++i) zero.xgrid[i] = -0.5 + (i + 0.5) / 51.0;
  ecg::FittedModel zfit;
  zfit.v_hat = Vector::Zero(2);
  zfit.theta_hat = Vector::Zero(2);
  zfit.a_hat = Vector::Ones(2);
  zfit.grid = uniform_grid(11);
  zfit.f_values = Vector::Zero(11);
  CHECK(ecg::residual_variance(zero, zfit) == Vector::Zero(2));
}

TEST_CASE("reference selection: identical beats tie to the first curve") {
  Vector v = Vector::Zero(4), theta = Vector::Zero(4), a = Vector::Ones(4);
  const ecg::SegmentedBeats beats = synthetic_beats(v, theta, a, 201, 0.0, 3);
  const ecg::ReferenceSelection sel = ecg::select_reference(beats);
  CHECK(sel.j_star == 0);
  CHECK((sel.scores.array() - sel.scores[0]).abs().maxCoeff() < 1e-6);
}

TEST_CASE("reference selection recovers the generating reference") {
  const ArrhythmiaSetup s;
  int hits = 0;
  const int seeds = 20;
  for (int r = 0; r < seeds; ++r) {
    const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 401, 0.04, 500 + r);
    ecg::EcgFitOptions opt;
    opt.shuffle_seed = 1000 + r;
    if (ecg::select_reference(beats, opt).j_star == s.true_ref) ++hits;
  }
  CHECK(hits >= 16);
}

TEST_CASE("selection is permutation-equivariant") {
  const ArrhythmiaSetup s;
  const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 301, 0.03, 99);
  const ecg::ReferenceSelection base = ecg::select_reference(beats);

  std::vector<Index> perm = {4, 2, 0, 1, 3};
  ecg::SegmentedBeats shuffled;
  shuffled.xgrid = beats.xgrid;
  shuffled.beats.resize(beats.p(), beats.n());
  for (Index r = 0; r < beats.p(); ++r) shuffled.beats.row(r) = beats.beats.row(perm[r]);
  const ecg::ReferenceSelection moved = ecg::select_reference(shuffled);
  CHECK(perm[moved.j_star] == base.j_star);
  for (Index r = 0; r < beats.p(); ++r)
    CHECK(moved.scores[r] == doctest::Approx(base.scores[perm[r]]).epsilon(1e-9));
}

TEST_CASE("reconstruction forms") {
  ecg::FittedModel fit;
  fit.v_hat = vec({0.0, 1.5});
  fit.theta_hat = vec({0.0, 0.1});
  fit.a_hat = vec({1.0, 2.0});
  fit.grid = uniform_grid(101);
  fit.f_values.resize(101);
  for (Index k = 0; k < 101; ++k) fit.f_values[k] = ecg_template(fit.grid[k]);

  // reference curve on a grid point: f_hat directly
  CHECK(ecg::reconstruct(fit, 0, fit.grid[30]) == fit.f_values[30]);

  // flat shape: reconstruction equals the height
  ecg::FittedModel flat = fit;
  flat.f_values.setZero();
  CHECK(ecg::reconstruct(flat, 1, 0.3) == 1.5);
}

TEST_CASE("noiseless reconstruction round trip") {
  const ArrhythmiaSetup s;
  const ecg::SegmentedBeats beats = synthetic_beats(s.v, s.theta, s.a, 401, 0.0, 1);
  const ecg::FittedModel fit = ecg::fit_with_reference(beats, s.true_ref);
  double sup = 0.0;
  for (Index j = 0; j < beats.p(); ++j)
    for (Index i = 0; i < beats.n(); ++i)
      sup = std::max(sup,
                     std::abs(beats.beats(j, i) - ecg::reconstruct(fit, j, beats.xgrid[i])));
  CHECK(sup < 0.1);
}
