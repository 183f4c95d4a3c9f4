#ifndef SIMREG_ECG_HPP
#define SIMREG_ECG_HPP

#include <cstdint>
#include <vector>

#include "simreg/core.hpp"
#include "simreg/shape.hpp"

namespace simreg::ecg {

struct Signal {
  std::vector<double> samples;
  double rate = 0.0;  // samples per second, informational
};

/// Equal-length beats cut around detected QRS maxima. Sample index i of every
/// beat maps to the midpoint abscissa x_i = -1/2 + (i + 1/2)/n, so the
/// detected maximum of an odd-length beat sits exactly at x = 0.
struct SegmentedBeats {
  Matrix beats;  // p x n
  Vector xgrid;  // n

  Index p() const noexcept { return beats.rows(); }
  Index n() const noexcept { return beats.cols(); }
};

/// Default detection threshold: 0.6 times the global maximum.
double default_threshold(const Signal& signal);

/// Detects local maxima above the threshold with a refractory window of
/// min_separation samples, cuts a window of the minimum inter-maximum gap
/// (reduced to odd length so maxima sit at the center) around each, and drops
/// beats whose window leaves the signal.
SegmentedBeats segment(const Signal& signal, Index min_separation, double threshold);

struct EcgFitOptions {
  double alpha = 0.9;
  Index grid_points = 71;
  std::uint64_t shuffle_seed = 1;
  double gain_scale = 0.0;  // 0 picks 1 / (2 pi (f1^2 + g1^2)), clamped to [1, 100]
  // Evaluation grid spans [-1/2 + margin, 1/2 - margin]: kernel windows use
  // raw differences, so shifted beats never inform the outermost band; queries
  // beyond the grid wrap through periodic interpolation.
  double grid_margin = 0.15;
};

/// Deformation fit of the beats, reported in the original curve order. The
/// reference curve is pinned to (a = 1, theta = 0); heights stay estimated.
struct FittedModel {
  Index ref = 0;  // 0-based reference curve
  Vector v_hat;
  Vector theta_hat;
  Vector a_hat;
  double f1_hat = 0.0;
  double g1_hat = 0.0;
  Vector grid;
  Vector f_values;
};

/// Runs the full recursive pipeline with the given curve as reference, in
/// non-symmetric mode with (f1, g1) estimated from that curve. Beats are
/// mean-centered before fitting; reported heights include the removed means.
/// Observations stream in a seeded shuffled order of the sample index.
FittedModel fit_with_reference(const SegmentedBeats& beats, Index ref,
                               const EcgFitOptions& options = {});

/// Per-curve mean squared residual of the fit against the beats.
Vector residual_variance(const SegmentedBeats& beats, const FittedModel& fit);

struct ReferenceSelection {
  Index j_star = 0;       // 0-based argmin of the l1 residual-variance norms
  Vector scores;          // one l1 norm per candidate reference
};

/// Fits once per candidate reference and keeps the curve whose residual
/// variance vector has the smallest l1 norm; ties go to the smallest index.
ReferenceSelection select_reference(const SegmentedBeats& beats,
                                    const EcgFitOptions& options = {});

/// a_hat_j f_hat(x - theta_hat_j) + v_hat_j with periodic grid interpolation.
double reconstruct(const FittedModel& fit, Index curve, double x);

}  // namespace simreg::ecg

#endif
