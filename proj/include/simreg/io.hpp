#ifndef SIMREG_IO_HPP
#define SIMREG_IO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "simreg/asymptotics.hpp"
#include "simreg/core.hpp"
#include "simreg/ecg.hpp"
#include "simreg/fit.hpp"
#include "simreg/model.hpp"

namespace simreg::io {

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

/// Dataset CSV with header "i,x,y1,...,yp", one row per observation.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

/// Kernel-regression settings as carried in config files.
struct NWJsonConfig {
  double alpha = 0.9;
  std::string kernel = "uniform";   // uniform | epanechnikov
  std::string weights = "uniform";  // uniform | optimal
  Index grid_points = 101;
};

/// Model configuration: parameters, noise levels, shape, density, sample size
/// and seed, as one JSON object; optionally a kernel-regression block.
struct ModelConfig {
  ModelParams params;
  Vector sigma;
  ShapeSpec shape = ShapeSpec::fourier_cosine(Vector::Ones(1));
  DesignDensity density = DesignDensity::uniform();
  Index n = 0;
  std::uint64_t seed = 0;
  std::optional<NWJsonConfig> nw;
};

ModelConfig read_model_config(const std::string& path);
void write_model_config(const std::string& path, const ModelConfig& config);

/// Estimator snapshot {n, v_hat, theta_hat, a_hat, f1_hat, truncations}.
void write_snapshot_json(const std::string& path, const FitResult& fit);

/// Long-format trajectory dump "n,component,value" for v and theta.
void write_trajectory_csv(const std::string& path, const FitResult& fit);

/// Shape grid export "x,f_hat[,ci_lo,ci_hi]".
void write_grid_csv(const std::string& path, const Ref<const Vector>& grid,
                    const Ref<const Vector>& f_values,
                    const std::vector<Interval>* intervals = nullptr);

void write_report_json(const std::string& path, const CovarianceReport& report);

/// One sample per line, or single-column CSV (a non-numeric first line is
/// treated as a header).
ecg::Signal read_signal(const std::string& path);

/// Segment export "beat,sample,x,value".
void write_beats_csv(const std::string& path, const ecg::SegmentedBeats& beats);

void write_ecg_fit_json(const std::string& path, const ecg::FittedModel& fit,
                        const Vector* scores = nullptr);

}  // namespace simreg::io

#endif
