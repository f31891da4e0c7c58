#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bansap/estimators.hpp"

using namespace bansap;
using Eigen::VectorXd;

namespace {

FunctionLossOracle::Fn constant_loss(double c) {
  return [c](long, const VectorXd&) { return c; };
}

FunctionLossOracle::Fn linear_loss(const VectorXd& a) {
  return [a](long, const VectorXd& x) { return a.dot(x); };
}

VectorXd basis(Eigen::Index d, Eigen::Index i) {
  VectorXd e = VectorXd::Zero(d);
  e[i] = 1.0;
  return e;
}

}  // namespace

TEST_CASE("one-point estimate on a constant loss") {
  FunctionLossOracle oracle(constant_loss(5.0));
  const GradientEstimate est =
      one_point_grad(oracle, 1, VectorXd::Zero(2), 0.5, Direction(basis(2, 0)));
  CHECK(est.g[0] == doctest::Approx(20.0));
  CHECK(est.g[1] == 0.0);
  CHECK(est.points_queried.size() == 1);
  CHECK(oracle.total_queries() == 1);
  CHECK(oracle.queries_in_current_slot() == 1);
}

TEST_CASE("one-point estimate is unbiased for a linear loss at the origin") {
  VectorXd a(2);
  a << 1.0, 2.0;
  FunctionLossOracle oracle(linear_loss(a));
  Rng rng(31);
  VectorXd mean = VectorXd::Zero(2);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Direction u = sample_direction(SamplingScheme::UniformSphere, 2, rng);
    mean += one_point_grad(oracle, 1, VectorXd::Zero(2), 0.1, u).g;
  }
  mean /= draws;
  CHECK(std::abs(mean[0] - 1.0) < 0.02);
  CHECK(std::abs(mean[1] - 2.0) < 0.02);
}

TEST_CASE("two-point estimate is exact for linear losses, draw by draw") {
  VectorXd a(4);
  a << -1.0, 0.5, 2.0, 3.0;
  FunctionLossOracle oracle(linear_loss(a));
  Rng rng(7);
  VectorXd x_hat(4);
  x_hat << 0.3, -0.2, 0.1, 0.0;
  VectorXd mean = VectorXd::Zero(4);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Direction u = sample_direction(SamplingScheme::UniformSphere, 4, rng);
    const GradientEstimate est = two_point_grad(oracle, 1, x_hat, 0.25, u);
    const VectorXd expected = 4.0 * a.dot(u.vec()) * u.vec();
    CHECK((est.g - expected).lpNorm<Eigen::Infinity>() <= 1e-10);
    mean += est.g;
  }
  mean /= draws;
  CHECK((mean - a).lpNorm<Eigen::Infinity>() < 0.05);

  // The tighter tolerance of the two-coordinate case.
  VectorXd a2(2);
  a2 << 1.0, 2.0;
  FunctionLossOracle oracle2(linear_loss(a2));
  VectorXd mean2 = VectorXd::Zero(2);
  for (int i = 0; i < draws; ++i) {
    const Direction u = sample_direction(SamplingScheme::UniformSphere, 2, rng);
    mean2 += two_point_grad(oracle2, 1, VectorXd::Zero(2), 0.1, u).g;
  }
  mean2 /= draws;
  CHECK((mean2 - a2).lpNorm<Eigen::Infinity>() < 0.02);
}

TEST_CASE("two-point estimate recovers the gradient of a quadratic") {
  FunctionLossOracle oracle([](long, const VectorXd& x) { return x.squaredNorm(); });
  Rng rng(11);
  VectorXd x_hat(2);
  x_hat << 1.0, 0.0;
  VectorXd mean = VectorXd::Zero(2);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Direction u = sample_direction(SamplingScheme::UniformSphere, 2, rng);
    mean += two_point_grad(oracle, 1, x_hat, 1e-3, u).g;
  }
  mean /= draws;
  CHECK(std::abs(mean[0] - 2.0) < 0.02);
  CHECK(std::abs(mean[1]) < 0.02);
}

TEST_CASE("two-point estimate vanishes on constants and queries twice") {
  FunctionLossOracle oracle(constant_loss(3.5));
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Direction u = sample_direction(SamplingScheme::UniformSphere, 3, rng);
    const GradientEstimate est = two_point_grad(oracle, i, VectorXd::Zero(3), 0.2, u);
    CHECK(est.g.norm() == 0.0);
    CHECK(est.points_queried.size() == 2);
    CHECK(oracle.queries_in_current_slot() == 2);
  }
}

TEST_CASE("m-point estimate averages forward differences and plays the iterate") {
  VectorXd a(3);
  a << 2.0, -1.0, 0.5;
  FunctionLossOracle oracle(linear_loss(a));
  Rng rng(13);
  VectorXd x_hat(3);
  x_hat << 0.1, 0.2, -0.1;

  SUBCASE("unbiased for linear losses") {
    VectorXd mean = VectorXd::Zero(3);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      mean += m_point_grad(oracle, 1, x_hat, 0.3, 5, SamplingScheme::UniformSphere, rng).g;
    }
    mean /= draws;
    CHECK((mean - a).lpNorm<Eigen::Infinity>() < 0.02);
  }

  SUBCASE("query accounting and the played points") {
    const GradientEstimate est =
        m_point_grad(oracle, 9, x_hat, 0.3, 5, SamplingScheme::UniformSphere, rng);
    CHECK(est.points_queried.size() == 5);
    CHECK(est.points_queried.back() == x_hat);  // the learning iterate itself
    CHECK(oracle.queries_in_current_slot() == 5);
  }

  SUBCASE("constant loss gives an exactly zero estimate") {
    FunctionLossOracle flat(constant_loss(-2.0));
    const GradientEstimate est =
        m_point_grad(flat, 1, x_hat, 0.3, 7, SamplingScheme::UniformSphere, rng);
    CHECK(est.g.norm() == 0.0);
  }

  SUBCASE("fewer than three points is rejected") {
    CHECK_THROWS_AS(
        (void)m_point_grad(oracle, 1, x_hat, 0.3, 2, SamplingScheme::UniformSphere, rng),
        std::invalid_argument);
  }
}

TEST_CASE("m-point variance decreases as feedback grows") {
  VectorXd a(3);
  a << 1.0, 2.0, -1.0;
  FunctionLossOracle oracle(linear_loss(a));
  Rng rng(21);
  const int trials = 10000;
  std::vector<double> variance;
  for (int m : {3, 5, 9}) {
    double sq = 0.0;
    for (int i = 0; i < trials; ++i) {
      const GradientEstimate est =
          m_point_grad(oracle, 1, VectorXd::Zero(3), 0.2, m, SamplingScheme::UniformSphere, rng);
      sq += (est.g - a).squaredNorm();
    }
    variance.push_back(sq / trials);
  }
  CHECK(variance[0] > variance[1]);
  CHECK(variance[1] > variance[2]);
}

TEST_CASE("smoothed value oracle") {
  Rng rng(8);

  SUBCASE("linearity kills the perturbation") {
    VectorXd a(3);
    a << 1.0, -2.0, 0.5;
    FunctionLossOracle oracle(linear_loss(a));
    VectorXd x(3);
    x << 0.2, 0.4, -0.3;
    const long n = 200000;
    const double smoothed = smoothed_value(oracle, 1, x, 0.7, n, rng);
    // Per-draw sd is |a| delta * sd(v_i) scale; three standard errors.
    const double se = 3.0 * 0.7 * a.norm() / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(smoothed - a.dot(x)) < se + 1e-3);
  }

  SUBCASE("squared norm at the origin gives the ball moment") {
    FunctionLossOracle oracle([](long, const VectorXd& x) { return x.squaredNorm(); });
    const double smoothed = smoothed_value(oracle, 1, VectorXd::Zero(2), 1.0, 100000, rng);
    CHECK(std::abs(smoothed - 0.5) < 0.02);
  }

  SUBCASE("the smoothing bias is at most G delta for Lipschitz losses") {
    VectorXd a(3);
    a << 0.6, -0.8, 0.2;
    FunctionLossOracle oracle([a](long, const VectorXd& x) { return std::log1p(std::exp(a.dot(x))); });
    const double lipschitz = a.norm();  // |sigmoid| <= 1
    VectorXd x(3);
    x << 0.5, 0.1, -0.2;
    for (double delta : {0.5, 0.1, 0.02}) {
      const double smoothed = smoothed_value(oracle, 1, x, delta, 100000, rng);
      const double exact = std::log1p(std::exp(a.dot(x)));
      CHECK(std::abs(smoothed - exact) <= lipschitz * delta + 5e-3);
    }
  }

  SUBCASE("invalid sample counts are rejected") {
    FunctionLossOracle oracle(constant_loss(1.0));
    CHECK_THROWS_AS((void)smoothed_value(oracle, 1, VectorXd::Zero(2), 0.1, 0, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("one- and two-point estimators are unbiased for the smoothed loss") {
  // Empirical mean of the estimator against a central difference of the
  // smoothed function, common random numbers on the ball draws.
  struct Case {
    const char* name;
    FunctionLossOracle::Fn fn;
  };
  VectorXd a(3);
  a << 0.8, -0.5, 0.3;
  const std::vector<Case> cases = {
      {"linear", linear_loss(a)},
      {"quadratic", [](long, const VectorXd& x) { return x.squaredNorm() + x[0]; }},
      {"softplus", [a](long, const VectorXd& x) { return std::log1p(std::exp(a.dot(x))); }},
  };

  const double delta = 0.3;
  const double h = 1e-3;
  VectorXd x_hat(3);
  x_hat << 0.2, -0.1, 0.4;

  for (const auto& test_case : cases) {
    CAPTURE(test_case.name);
    FunctionLossOracle oracle(test_case.fn);

    const long estimator_draws = 1000000;
    Rng rng(101);
    VectorXd mean1 = VectorXd::Zero(3);
    VectorXd sq1 = VectorXd::Zero(3);
    VectorXd mean2 = VectorXd::Zero(3);
    VectorXd sq2 = VectorXd::Zero(3);
    for (long i = 0; i < estimator_draws; ++i) {
      const Direction u = sample_direction(SamplingScheme::UniformSphere, 3, rng);
      const VectorXd g1 = one_point_grad(oracle, 1, x_hat, delta, u).g;
      const VectorXd g2 = two_point_grad(oracle, 1, x_hat, delta, u).g;
      mean1 += g1;
      sq1 += g1.cwiseProduct(g1);
      mean2 += g2;
      sq2 += g2.cwiseProduct(g2);
    }
    mean1 /= estimator_draws;
    mean2 /= estimator_draws;

    // Central difference of the smoothed function with shared ball draws.
    const long ball_draws = 200000;
    VectorXd cd(3), cd_se(3);
    for (int k = 0; k < 3; ++k) {
      Rng ball_rng(555);  // identical draws for the +/- evaluations
      double sum = 0.0, sumsq = 0.0;
      for (long i = 0; i < ball_draws; ++i) {
        const VectorXd v = sample_ball(3, ball_rng);
        const VectorXd shift = delta * v;
        VectorXd xp = x_hat + shift;
        xp[k] += h;
        VectorXd xm = x_hat + shift;
        xm[k] -= h;
        const double diff = (test_case.fn(1, xp) - test_case.fn(1, xm)) / (2.0 * h);
        sum += diff;
        sumsq += diff * diff;
      }
      cd[k] = sum / ball_draws;
      const double var = std::max(0.0, sumsq / ball_draws - cd[k] * cd[k]);
      cd_se[k] = std::sqrt(var / ball_draws);
    }

    for (int k = 0; k < 3; ++k) {
      const double var1 =
          std::max(0.0, sq1[k] / estimator_draws - mean1[k] * mean1[k]) / estimator_draws;
      const double var2 =
          std::max(0.0, sq2[k] / estimator_draws - mean2[k] * mean2[k]) / estimator_draws;
      const double tol1 = 3.0 * std::sqrt(var1 + cd_se[k] * cd_se[k]) + 1e-4;
      const double tol2 = 3.0 * std::sqrt(var2 + cd_se[k] * cd_se[k]) + 1e-4;
      CHECK(std::abs(mean1[k] - cd[k]) < tol1);
      CHECK(std::abs(mean2[k] - cd[k]) < tol2);
    }
  }
}

TEST_CASE("norm bounds hold on every estimate") {
  // |f| <= F and G-Lipschitz by construction.
  VectorXd a(4);
  a << 0.4, -0.7, 0.2, 0.5;
  const double f_bound = 2.0;
  const double g_bound = 2.0 * a.norm();
  FunctionLossOracle oracle(
      [a](long, const VectorXd& x) { return 2.0 * std::sin(a.dot(x)); }, nullptr, f_bound,
      g_bound);

  Rng rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    VectorXd x_hat(4);
    for (int k = 0; k < 4; ++k) x_hat[k] = 2.0 * unit(rng) - 1.0;
    const double delta = 0.05 + unit(rng);
    const Direction u = sample_direction(
        i % 2 == 0 ? SamplingScheme::UniformSphere : SamplingScheme::CoordinateBasis, 4, rng);
    CHECK(one_point_grad(oracle, 1, x_hat, delta, u).g.norm() <= 4.0 * f_bound / delta + 1e-9);
    CHECK(two_point_grad(oracle, 1, x_hat, delta, u).g.norm() <= 4.0 * g_bound + 1e-9);
  }
}

TEST_CASE("queries outside the declared domain are contract violations") {
  const BoxSet box(VectorXd::Zero(2), VectorXd::Constant(2, 1.0));
  FunctionLossOracle oracle(constant_loss(1.0), &box);
  const VectorXd center = box.center();
  CHECK_THROWS_AS((void)one_point_grad(oracle, 1, center, 0.6, Direction(basis(2, 0))),
                  std::domain_error);
  CHECK_THROWS_AS((void)two_point_grad(oracle, 1, center, 0.6, Direction(basis(2, 1))),
                  std::domain_error);
  // Inside the admissible radius the query goes through.
  CHECK_NOTHROW((void)two_point_grad(oracle, 1, center, 0.4, Direction(basis(2, 0))));
}

TEST_CASE("per-slot query budgets are enforced") {
  FunctionLossOracle oracle(constant_loss(0.0));
  oracle.set_query_budget(1);
  CHECK_NOTHROW((void)one_point_grad(oracle, 1, VectorXd::Zero(2), 0.1, Direction(basis(2, 0))));
  CHECK_THROWS_AS((void)two_point_grad(oracle, 2, VectorXd::Zero(2), 0.1, Direction(basis(2, 0))),
                  std::runtime_error);
  oracle.set_query_budget(std::nullopt);
  CHECK_NOTHROW((void)two_point_grad(oracle, 3, VectorXd::Zero(2), 0.1, Direction(basis(2, 0))));
}

TEST_CASE("estimators reject non-positive exploration radii") {
  FunctionLossOracle oracle(constant_loss(0.0));
  Rng rng(1);
  CHECK_THROWS_AS((void)one_point_grad(oracle, 1, VectorXd::Zero(2), 0.0, Direction(basis(2, 0))),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)m_point_grad(oracle, 1, VectorXd::Zero(2), -1.0, 4, SamplingScheme::UniformSphere, rng),
      std::invalid_argument);
}
