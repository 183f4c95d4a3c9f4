#include "simreg/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "simreg/asymptotics.hpp"
#include "simreg/ecg.hpp"
#include "simreg/estimators.hpp"
#include "simreg/fit.hpp"
#include "simreg/io.hpp"
#include "simreg/model.hpp"

namespace simreg::cli {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

io::ModelConfig require_config(const RunConfig& cfg) {
  if (cfg.config_path.empty()) raise(Err::ConfigError, "this command needs --config");
  return io::read_model_config(cfg.config_path);
}

Dataset require_dataset(const RunConfig& cfg) {
  if (cfg.input_path.empty()) raise(Err::ConfigError, "this command needs --input");
  Dataset data = io::read_dataset_csv(cfg.input_path);
  if (data.n() < 1) raise(Err::InsufficientData, cfg.input_path + " holds no observations");
  return data;
}

Vector sign_vector(const ModelParams& params, double f1) {
  Vector s(params.p());
  for (Index j = 0; j < params.p(); ++j) s[j] = params.a[j] * f1 >= 0.0 ? 1.0 : -1.0;
  return s;
}

FitOptions fit_options(const RunConfig& cfg, const io::ModelConfig& model, bool with_shape) {
  FitOptions opt;
  if (cfg.sign_mode == "dual") {
    opt.sign_mode = SignMode::DualRun;
  } else if (cfg.sign_mode == "known") {
    opt.sign_mode = SignMode::Known;
    opt.signs = sign_vector(model.params, model.shape.f1());
  } else {
    raise(Err::ConfigError, "--sign-mode must be 'known' or 'dual'");
  }
  if (cfg.nonsym) {
    opt.symmetric = false;
    opt.fourier = std::make_pair(model.shape.f1(), model.shape.g1());
  }
  opt.f1_known = model.shape.f1();
  opt.with_shape = with_shape;
  if (model.nw) {
    opt.nw.alpha = model.nw->alpha;
    opt.nw.kernel = model.nw->kernel == "epanechnikov" ? KernelSpec::epanechnikov()
                                                       : KernelSpec::uniform();
    opt.nw.grid = uniform_grid(model.nw->grid_points);
    if (model.nw->weights == "optimal") {
      const ModelParams params = model.params;
      const Vector sigma = model.sigma;
      const DesignDensity density = model.density;
      opt.nw.weights = WeightRule::custom([params, sigma, density](double x) {
        return weights_optimal(x, params, sigma, density);
      });
    }
  }
  if (cfg.alpha) opt.nw.alpha = *cfg.alpha;
  return opt;
}

/// Plug-in covariance report: Gamma(v), phi -> Sigma(theta), Gamma(a) and its
/// estimated-f1 variant, plus normal intervals for every component.
CovarianceReport make_report(const Dataset& data, const DesignDensity& density,
                             const FitResult& fit, double level) {
  if (!fit.a_hat) raise(Err::DegenerateF1, "scale estimates unavailable");
  CovarianceReport rep;
  rep.sample_n = fit.n;
  rep.level = level;
  rep.gamma_v = gamma_v_estimate(data, density);
  Vector signs(fit.theta_hat.size());
  for (Index j = 0; j < signs.size(); ++j)
    signs[j] = (*fit.a_hat)[j] * fit.f1_used >= 0.0 ? 1.0 : -1.0;
  const Matrix phi = phi_theta_estimate(data, fit.theta_hat, signs, density);
  rep.sigma_theta = sigma_theta_from_phi(phi, *fit.a_hat, fit.f1_used);
  std::tie(rep.gamma_a, rep.gamma_a_tilde) =
      gamma_a_estimate(data, fit.theta_hat, fit.f1_used, *fit.a_hat, density);
  rep.ci_v = ci_param(fit.v_hat, rep.gamma_v, fit.n, level);
  rep.ci_theta = ci_param(fit.theta_hat, rep.sigma_theta, fit.n, level);
  rep.ci_a = ci_param(*fit.a_hat, rep.gamma_a, fit.n, level);
  return rep;
}

int cmd_simulate(const RunConfig& cfg) {
  io::ModelConfig model = require_config(cfg);
  if (cfg.seed) model.seed = *cfg.seed;
  if (model.n < 1) raise(Err::ConfigError, "config must set n >= 1");
  const Dataset data =
      simulate(model.params, model.shape, model.density, model.sigma, model.n, model.seed);
  io::write_dataset_csv(out_path(cfg, "dataset.csv"), data);
  io::write_model_config(out_path(cfg, "config.json"), model);
  return kExitOk;
}

int cmd_fit(const RunConfig& cfg) {
  const io::ModelConfig model = require_config(cfg);
  const Dataset data = require_dataset(cfg);
  FitOptions opt = fit_options(cfg, model, false);
  opt.record_trajectories = true;
  const FitResult fit = fit_dataset(data, model.density, opt);
  io::write_snapshot_json(out_path(cfg, "snapshot.json"), fit);
  io::write_trajectory_csv(out_path(cfg, "trajectory.csv"), fit);
  return kExitOk;
}

int cmd_ci(const RunConfig& cfg) {
  const io::ModelConfig model = require_config(cfg);
  const FitOptions opt = fit_options(cfg, model, false);

  if (cfg.reps <= 1) {
    const Dataset data = require_dataset(cfg);
    const FitResult fit = fit_dataset(data, model.density, opt);
    io::write_report_json(out_path(cfg, "report.json"),
                          make_report(data, model.density, fit, cfg.level));
    return kExitOk;
  }

  // Replication sweep: one row per seed with interval lengths and coverage
  // flags against the configured truth.
  std::ofstream summary(out_path(cfg, "summary.csv"));
  const Index p = model.params.p();
  summary << "seed";
  for (const char* part : {"v", "theta", "a"})
    for (Index j = 1; j <= p; ++j)
      summary << ",len_" << part << j << ",cover_" << part << j;
  summary << '\n';
  const std::uint64_t base = cfg.seed.value_or(model.seed);
  for (int r = 0; r < cfg.reps; ++r) {
    const std::uint64_t seed = base + static_cast<std::uint64_t>(r);
    const Dataset data =
        simulate(model.params, model.shape, model.density, model.sigma, model.n, seed);
    const FitResult fit = fit_dataset(data, model.density, opt);
    const CovarianceReport rep = make_report(data, model.density, fit, cfg.level);
    summary << seed;
    auto emit = [&summary](const std::vector<Interval>& iv, const Vector& truth) {
      for (Index j = 0; j < truth.size(); ++j)
        summary << ',' << io::format_double(iv[j].length()) << ','
                << (iv[j].lo <= truth[j] && truth[j] <= iv[j].hi ? 1 : 0);
    };
    emit(rep.ci_v, model.params.v);
    emit(rep.ci_theta, model.params.theta);
    emit(rep.ci_a, model.params.a);
    summary << '\n';
  }
  return kExitOk;
}

int cmd_shape(const RunConfig& cfg) {
  const io::ModelConfig model = require_config(cfg);
  const Dataset data = require_dataset(cfg);
  const FitOptions opt = fit_options(cfg, model, true);
  const FitResult fit = fit_dataset(data, model.density, opt);
  if (!fit.a_hat) raise(Err::DegenerateF1, "scale estimates unavailable");

  // Plug-in pointwise variance: estimated parameters plus first-difference
  // noise levels (fit-independent, so the band is not inflated by f_hat error).
  const Vector sigma = rice_sigma2(data).cwiseMax(1e-12).cwiseSqrt();
  ModelParams plug{fit.v_hat, fit.theta_hat, *fit.a_hat};
  std::vector<Interval> bands(opt.nw.grid.size());
  for (Index k = 0; k < opt.nw.grid.size(); ++k) {
    const Vector w = opt.nw.weights.at(opt.nw.grid[k], data.p());
    const double var = nw_variance(opt.nw.grid[k], opt.nw.alpha, opt.nw.kernel.nu2(), w, plug,
                                   sigma, model.density);
    bands[k] = ci_shape(fit.f_grid[k], var, fit.n, opt.nw.alpha, cfg.level);
  }
  io::write_grid_csv(out_path(cfg, "shape.csv"), opt.nw.grid, fit.f_grid, &bands);
  return kExitOk;
}

int cmd_qsl(const RunConfig& cfg) {
  io::ModelConfig model = require_config(cfg);
  if (cfg.seed) model.seed = *cfg.seed;
  Dataset data;
  if (!cfg.input_path.empty()) {
    data = require_dataset(cfg);
  } else {
    if (model.n < 1) raise(Err::ConfigError, "config must set n >= 1");
    data = simulate(model.params, model.shape, model.density, model.sigma, model.n, model.seed);
  }
  FitOptions opt = fit_options(cfg, model, false);
  opt.record_trajectories = true;
  const FitResult fit = fit_dataset(data, model.density, opt);
  const Matrix qsl_v = qsl_diagnostic(fit.v_trajectory, model.params.v);
  const Matrix qsl_theta = qsl_diagnostic(fit.theta_trajectory, model.params.theta);
  const CovarianceReport rep = make_report(data, model.density, fit, cfg.level);

  const auto rel = [](const Matrix& got, const Matrix& want) {
    return (got - want).norm() / want.norm();
  };
  std::ofstream out(out_path(cfg, "qsl.json"));
  out << "{\n  \"qsl_v\": " << qsl_v.format(Eigen::IOFormat(16, 0, ", ", ", ", "[", "]", "[", "]"))
      << ",\n  \"qsl_theta\": "
      << qsl_theta.format(Eigen::IOFormat(16, 0, ", ", ", ", "[", "]", "[", "]"))
      << ",\n  \"gamma_v\": "
      << rep.gamma_v.format(Eigen::IOFormat(16, 0, ", ", ", ", "[", "]", "[", "]"))
      << ",\n  \"sigma_theta\": "
      << rep.sigma_theta.format(Eigen::IOFormat(16, 0, ", ", ", ", "[", "]", "[", "]"))
      << ",\n  \"rel_frobenius_v\": " << rel(qsl_v, rep.gamma_v)
      << ",\n  \"rel_frobenius_theta\": " << rel(qsl_theta, rep.sigma_theta) << "\n}\n";
  return kExitOk;
}

int cmd_ecg_segment(const RunConfig& cfg) {
  if (cfg.input_path.empty()) raise(Err::ConfigError, "ecg-segment needs --input");
  const ecg::Signal sig = io::read_signal(cfg.input_path);
  const double thr = cfg.threshold.value_or(sig.samples.empty() ? 0.0
                                                                : ecg::default_threshold(sig));
  const ecg::SegmentedBeats beats = ecg::segment(sig, cfg.min_separation, thr);
  io::write_beats_csv(out_path(cfg, "beats.csv"), beats);
  return kExitOk;
}

int cmd_ecg_fit(const RunConfig& cfg) {
  if (cfg.input_path.empty()) raise(Err::ConfigError, "ecg-fit needs --input");
  const ecg::Signal sig = io::read_signal(cfg.input_path);
  const double thr = cfg.threshold.value_or(sig.samples.empty() ? 0.0
                                                                : ecg::default_threshold(sig));
  const ecg::SegmentedBeats beats = ecg::segment(sig, cfg.min_separation, thr);
  ecg::EcgFitOptions opt;
  if (cfg.alpha) opt.alpha = *cfg.alpha;
  if (cfg.seed) opt.shuffle_seed = *cfg.seed;

  Index ref;
  Vector scores;
  if (cfg.ref) {
    ref = *cfg.ref - 1;  // CLI uses 1-based curves
  } else {
    const ecg::ReferenceSelection sel = ecg::select_reference(beats, opt);
    ref = sel.j_star;
    scores = sel.scores;
  }
  const ecg::FittedModel fit = ecg::fit_with_reference(beats, ref, opt);
  io::write_ecg_fit_json(out_path(cfg, "ecg_fit.json"), fit,
                         scores.size() ? &scores : nullptr);
  io::write_grid_csv(out_path(cfg, "ecg_shape.csv"), fit.grid, fit.f_values);
  return kExitOk;
}

}  // namespace

int exit_code_for(Err code) noexcept {
  switch (code) {
    case Err::ShiftOutOfRange:
    case Err::FirstCurveNotReference:
    case Err::ZeroScale:
    case Err::ZeroFirstFourier:
    case Err::InvalidParams:
    case Err::ZeroArgument:
    case Err::MissingCoefficients:
    case Err::WrongMode:
    case Err::AlphaTooSmall:
    case Err::ConfigError:
      return kExitConfig;
    case Err::InsufficientData:
    case Err::NoBeatsDetected:
    case Err::SignalTooShort:
    case Err::ParseError:
    case Err::FileError:
      return kExitData;
    default:
      return kExitNumeric;
  }
}

int run(const RunConfig& config) {
  try {
    if (config.command == "simulate") return cmd_simulate(config);
    if (config.command == "fit") return cmd_fit(config);
    if (config.command == "ci") return cmd_ci(config);
    if (config.command == "shape") return cmd_shape(config);
    if (config.command == "qsl") return cmd_qsl(config);
    if (config.command == "ecg-segment") return cmd_ecg_segment(config);
    if (config.command == "ecg-fit") return cmd_ecg_fit(config);
    raise(Err::ConfigError, "unknown command '" + config.command + "'");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace simreg::cli
