#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "simreg/asymptotics.hpp"
#include "simreg/model.hpp"
#include "simreg/rng.hpp"

using namespace simreg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ModelParams paper_params() {
  return ModelParams{vec({0.0, 1.0 / 3.0, -1.0, 2.0, -0.9}),
                     vec({0.0, 0.2, -0.05, -1.0 / 7.0, 1.0 / 6.0}),
                     vec({1.0, -4.0, 3.0, -2.5, -2.0})};
}

ShapeSpec paper_shape() { return ShapeSpec::fourier_cosine(Vector::Ones(5)); }

Dataset constant_dataset(Index n, const Vector& row) {
  Dataset d;
  d.x = Vector::Zero(n);
  CounterRng rng(1);
  for (Index i = 0; i < n; ++i) d.x[i] = rng.uniform(-0.5, 0.5);
  d.y.resize(n, row.size());
  d.y.rowwise() = row.transpose();
  return d;
}

}  // namespace

TEST_CASE("normal quantile") {
  CHECK(std::abs(normal_quantile(0.975) - 1.9599639845400545) < 1e-9);
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(normal_quantile(0.9999) - 3.719016485455709) < 1e-9);
  CounterRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform(1e-6, 1.0 - 1e-6);
    CHECK(std::abs(normal_quantile(p) + normal_quantile(1.0 - p)) < 1e-9);
  }
  CHECK_THROWS_AS(normal_quantile(0.0), Error);
}

TEST_CASE("Gamma(v): degenerate and analytic cases") {
  const DesignDensity g = DesignDensity::uniform();
  const Matrix zero = gamma_v_estimate(constant_dataset(50, vec({2.0, -1.0})), g);
  CHECK(zero.cwiseAbs().maxCoeff() < 1e-12);

  // p=1, a=1, theta=0, sigma=1: Var(Y/g) = int f^2 + 1 = 5/2 + 1 = 3.5
  const ModelParams m{vec({0.0}), vec({0.0}), vec({1.0})};
  const Dataset d = simulate(m, paper_shape(), g, vec({1.0}), 20000, 55);
  const Matrix got = gamma_v_estimate(d, g);
  CHECK(got(0, 0) == doctest::Approx(3.5).epsilon(0.03));

  CHECK_THROWS_AS(gamma_v_estimate(constant_dataset(1, vec({1.0})), g), Error);
}

TEST_CASE("phi estimate: zero data, Gram structure, quadrature oracle") {
  const DesignDensity g = DesignDensity::uniform();
  Dataset zeros = constant_dataset(100, vec({0.0, 0.0}));
  CHECK(phi_theta_estimate(zeros, vec({0.0, 0.1}), vec({1.0, -1.0}), g).cwiseAbs().maxCoeff() ==
        0.0);

  // symmetric positive semidefinite on random data
  const ModelParams m = paper_params();
  const Dataset d = simulate(m, paper_shape(), g, Vector::Ones(5), 500, 77);
  const Matrix phi = phi_theta_estimate(d, m.theta, vec({1.0, -1.0, 1.0, -1.0, -1.0}), g);
  CHECK((phi - phi.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(phi);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);

  // p=1 oracle: E[sin^2(2 pi (X - t)) (f(X) + v)^2] + sigma^2 E[sin^2(2 pi (X - t))]
  const ModelParams m1{vec({0.7}), vec({0.0}), vec({1.0})};
  const double sigma = 0.8, t_hat = 0.05;
  const ShapeSpec f = paper_shape();
  const Index n = 200000;
  const Dataset d1 = simulate(m1, f, g, vec({sigma}), n, 5150);
  const Matrix phi1 = phi_theta_estimate(d1, vec({t_hat}), vec({1.0}), g);
  auto sin2 = [&](double x) {
    const double s = std::sin(kTwoPi * (x - t_hat));
    return s * s;
  };
  const double want =
      integrate([&](double x) { return sin2(x) * (f(x) + 0.7) * (f(x) + 0.7); }, -0.5, 0.5,
                1e-10) +
      sigma * sigma * integrate(sin2, -0.5, 0.5, 1e-10);
  // standard error of the empirical mean of V^2
  double m2 = 0.0, m4 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double v = std::sin(kTwoPi * (d1.x[i] - t_hat)) * d1.y(i, 0);
    m2 += v * v;
    m4 += v * v * v * v;
  }
  m2 /= n;
  m4 /= n;
  const double se = std::sqrt((m4 - m2 * m2) / n);
  CHECK(std::abs(phi1(0, 0) - want) < 3.0 * se);
}

TEST_CASE("Sigma(theta) from phi") {
  const Matrix sigma = sigma_theta_from_phi(Matrix::Identity(2, 2), vec({1.0, 1.0}), 0.5);
  CHECK(sigma(0, 0) == doctest::Approx(1.0 / (kTwoPi - 1.0)));
  CHECK(sigma(1, 1) == doctest::Approx(1.0 / (kTwoPi - 1.0)));
  CHECK(sigma(0, 1) == 0.0);  // zero phi entry stays zero

  // paper setup: 4 pi |f1| min|a_j| = 2 pi > 1 is accepted
  CHECK_NOTHROW(sigma_theta_from_phi(Matrix::Identity(5, 5), paper_params().a, 0.5));
  CHECK_THROWS_AS(sigma_theta_from_phi(Matrix::Identity(1, 1), vec({0.1}), 0.5), Error);
}

TEST_CASE("Gamma(a) and the estimated-f1 variant") {
  const DesignDensity g = DesignDensity::uniform();
  Dataset zeros = constant_dataset(100, vec({0.0, 0.0}));
  const auto [ga, gt] = gamma_a_estimate(zeros, vec({0.0, 0.1}), 0.5, vec({1.0, 2.0}), g);
  CHECK(ga.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gt.cwiseAbs().maxCoeff() < 1e-12);

  // M_p with a_hat = e_1 zeroes the first row and column of the tilde matrix
  const ModelParams m = paper_params();
  const Dataset d = simulate(m, paper_shape(), g, Vector::Ones(5), 400, 21);
  const auto [ga2, gt2] = gamma_a_estimate(d, m.theta, 0.5, Vector::Unit(5, 0), g);
  CHECK(gt2(0, 0) == 0.0);
  CHECK(gt2.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(gt2.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ga2 - ga2.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(gamma_a_estimate(d, m.theta, 0.0, m.a, g), Error);
}

TEST_CASE("parameter intervals") {
  const auto degenerate = ci_param(vec({1.5}), Matrix::Zero(1, 1), 100, 0.95);
  CHECK(degenerate[0].lo == 1.5);
  CHECK(degenerate[0].hi == 1.5);

  const auto iv = ci_param(vec({0.0}), Matrix::Identity(1, 1), 100, 0.95);
  CHECK(iv[0].hi == doctest::Approx(0.195996).epsilon(1e-5));

  // half-width scales exactly like 1/sqrt(n)
  const auto at_n = ci_param(vec({0.0}), Matrix::Identity(1, 1), 500, 0.9)[0];
  const auto at_4n = ci_param(vec({0.0}), Matrix::Identity(1, 1), 2000, 0.9)[0];
  CHECK(std::abs(at_n.length() / at_4n.length() - 2.0) < 1e-9);

  Matrix neg = -Matrix::Identity(1, 1);
  CHECK_THROWS_AS(ci_param(vec({0.0}), neg, 10, 0.95), Error);
}

TEST_CASE("pointwise shape variance reproduces the published piecewise table") {
  const ModelParams m = paper_params();
  const DesignDensity g = DesignDensity::uniform();
  const Vector w = Vector::Constant(5, 0.2);
  const Vector sigma = Vector::Ones(5);
  auto w2 = [&](double x) { return nw_variance(x, 0.9, 0.5, w, m, sigma, g); };

  // table rows were truncated to 4 decimals in print; evaluate inside each band
  CHECK(std::abs(w2(0.0) - 0.0166) < 1e-4);
  CHECK(std::abs(w2(0.15) - 0.0083) < 1e-4);
  CHECK(std::abs(w2(-0.15) - 0.0083) < 1e-4);
  CHECK(std::abs(w2(0.32) - 0.0086) < 1e-4);
  CHECK(std::abs(w2(0.345) - 0.0099) < 1e-4);
  CHECK(std::abs(w2(-0.40) - 0.0108) < 1e-4);
  CHECK(std::abs(w2(0.47) - 0.0114) < 1e-4);
}

TEST_CASE("pointwise shape variance, single-curve constants") {
  const ModelParams m{vec({0.0}), vec({0.0}), vec({1.0})};
  const DesignDensity g = DesignDensity::uniform();
  const Vector w = Vector::Ones(1);
  const Vector sigma = Vector::Ones(1);
  CHECK(std::abs(nw_variance(0.1, 0.9, 0.5, w, m, sigma, g) - 5.0 / 38.0) < 1e-12);
  CHECK(std::abs(nw_variance(0.0, 0.9, 0.5, w, m, sigma, g) - 5.0 / 19.0) < 1e-12);
  CHECK_THROWS_AS(nw_variance(0.1, 0.3, 0.5, w, m, sigma, g), Error);  // alpha too small
}

TEST_CASE("shape confidence interval lengths match the published values") {
  const ModelParams m = paper_params();
  const DesignDensity g = DesignDensity::uniform();
  const Vector w = Vector::Constant(5, 0.2);
  const Vector sigma = Vector::Ones(5);

  const double w2_0 = nw_variance(0.0, 0.9, 0.5, w, m, sigma, g);
  const Interval kn = ci_shape(0.0, w2_0, 2000, 0.9, 0.95);
  CHECK(std::abs(kn.length() - 0.3460) < 0.02 * 0.3460);

  // single-curve comparison J_n at x != 0 uses v^2 = 5/38
  const Interval jn = ci_shape(0.0, 5.0 / 38.0, 2000, 0.9, 0.95);
  CHECK(std::abs(jn.length() - 0.9723) < 0.02 * 0.9723);

  const Interval degen = ci_shape(1.0, 0.0, 2000, 0.9, 0.95);
  CHECK(degen.length() == 0.0);
  CHECK_THROWS_AS(ci_shape(0.0, -1.0, 2000, 0.9, 0.95), Error);
}

TEST_CASE("QSL diagnostic") {
  std::vector<Vector> constant(50, vec({1.0, -2.0}));
  const Matrix zero = qsl_diagnostic(constant, vec({1.0, -2.0}));
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

  // accumulator agrees with the batch computation exactly
  CounterRng rng(9);
  std::vector<Vector> traj;
  QslAccumulator acc(vec({0.5, -0.5}));
  for (int i = 0; i < 300; ++i) {
    Vector e(2);
    e << rng.uniform(-1, 1), rng.uniform(-1, 1);
    traj.push_back(e);
    acc.add(e);
  }
  CHECK(qsl_diagnostic(traj, vec({0.5, -0.5})) == acc.value());
  CHECK_THROWS_AS(qsl_diagnostic({vec({1.0})}, vec({1.0})), Error);
}

TEST_CASE("covariance estimates are symmetric with nonnegative diagonals, fuzzing") {
  const DesignDensity g = DesignDensity::uniform();
  const ModelParams m = paper_params();
  CounterRng rng(60601);
  for (int rep = 0; rep < 30; ++rep) {
    const Dataset d =
        simulate(m, paper_shape(), g, Vector::Ones(5), 120, 90000 + rep);
    const Matrix gv = gamma_v_estimate(d, g);
    Vector t_hat(5), signs(5);
    for (Index j = 0; j < 5; ++j) {
      t_hat[j] = rng.uniform(-0.25, 0.25);
      signs[j] = rng.next_double() < 0.5 ? 1.0 : -1.0;
    }
    const Matrix phi = phi_theta_estimate(d, t_hat, signs, g);
    const auto [ga, gt] = gamma_a_estimate(d, t_hat, 0.5, m.a, g);
    for (const Matrix& mat : {gv, phi, ga, gt}) {
      CHECK((mat - mat.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(mat.diagonal().minCoeff() > -1e-12);
    }
  }
}

TEST_CASE("first-difference noise estimate") {
  const DesignDensity g = DesignDensity::uniform();
  const ModelParams m{vec({0.0, 0.5}), vec({0.0, 0.1}), vec({1.0, -2.0})};
  const ShapeSpec f = ShapeSpec::fourier_cosine(Vector::Ones(5));
  const Dataset d = simulate(m, f, g, vec({0.8, 0.3}), 4000, 1234);
  const Vector s2 = rice_sigma2(d);
  CHECK(s2[0] == doctest::Approx(0.64).epsilon(0.08));
  CHECK(s2[1] == doctest::Approx(0.09).epsilon(0.15));

  // noiseless smooth data: neighboring differences nearly cancel
  const Dataset clean = simulate(m, f, g, Vector::Zero(2), 4000, 77);
  CHECK(rice_sigma2(clean).maxCoeff() < 0.05);

  Dataset tiny;
  tiny.x = Vector::Zero(1);
  tiny.y = Matrix::Zero(1, 1);
  CHECK_THROWS_AS(rice_sigma2(tiny), Error);
}
