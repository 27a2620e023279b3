#include <doctest.h>

#include <cmath>
#include <limits>

#include "gwvqa/numopt.hpp"

using namespace gwvqa;

TEST_CASE("forward-difference gradient") {
  Objective sq = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  auto g = finite_diff_gradient(sq, std::vector<double>{1.0, 2.0});
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-5));

  Objective lin = [](std::span<const double> x) { return 3.0 * x[0] - 0.5 * x[1] + 1.0; };
  auto gl = finite_diff_gradient(lin, std::vector<double>{0.25, -0.75}, 1e-6);
  CHECK(std::abs(gl[0] - 3.0) < 1e-9);
  CHECK(std::abs(gl[1] + 0.5) < 1e-9);

  Objective trig = [](std::span<const double> x) {
    return std::sin(x[0]) * std::cos(2.0 * x[1]) + 0.3 * std::cos(x[0] * x[2]);
  };
  std::vector<double> x{0.4, -1.1, 2.3};
  auto gt = finite_diff_gradient(trig, x);
  const double h = 1e-6;
  for (std::size_t i = 0; i < 3; ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    CHECK(gt[i] == doctest::Approx((trig(xp) - trig(xm)) / (2 * h)).epsilon(1e-4));
  }

  Objective bad = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
  try {
    finite_diff_gradient(bad, std::vector<double>{1.0});
    FAIL("expected EvaluationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EvaluationError);
  }
}

TEST_CASE("BFGS maximizes a concave quadratic") {
  Objective f = [](std::span<const double> x) { return -(x[0] - 3.0) * (x[0] - 3.0); };
  auto r = bfgs_maximize(f, {0.0});
  CHECK(r.x_star[0] == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(r.converged);
  CHECK(r.termination == Termination::GradientTol);
  CHECK(r.gradient_norm <= 1e-3);
  CHECK(r.objective_evals >= r.iterations);
}

TEST_CASE("BFGS solves Rosenbrock") {
  Objective f = [](std::span<const double> x) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    return -(a * a + 100.0 * b * b);
  };
  BfgsOptions opt;
  opt.gtol = 1e-6;
  opt.max_iter = 500;
  auto r = bfgs_maximize(f, {-1.2, 1.0}, opt);
  CHECK(r.x_star[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.x_star[1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.value >= f(std::vector<double>{-1.2, 1.0}));
}

TEST_CASE("constant objective converges immediately") {
  Objective f = [](std::span<const double>) { return 4.0; };
  auto r = bfgs_maximize(f, {0.3, -0.2});
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
  CHECK(r.gradient_norm == 0.0);
  CHECK(r.x_star == std::vector<double>{0.3, -0.2});
}

TEST_CASE("BFGS is deterministic and monotone") {
  Objective f = [](std::span<const double> x) {
    return std::cos(x[0]) * std::sin(x[1] + 0.3) + 0.1 * std::sin(3.0 * x[0] * x[1]);
  };
  const std::vector<double> x0{0.9, -0.4};
  auto a = bfgs_maximize(f, x0);
  auto b = bfgs_maximize(f, x0);
  CHECK(a.x_star == b.x_star);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
  CHECK(a.objective_evals == b.objective_evals);
  CHECK(a.value >= f(x0));
}

TEST_CASE("scaled objectives share the maximizer") {
  for (double s : {0.1, 10.0}) {
    Objective f = [s](std::span<const double> x) {
      return -s * ((x[0] - 3.0) * (x[0] - 3.0) + 2.0 * (x[1] + 1.0) * (x[1] + 1.0));
    };
    BfgsOptions opt;
    opt.gtol = 1e-7;
    auto r = bfgs_maximize(f, {0.0, 0.0}, opt);
    CHECK(std::abs(r.x_star[0] - 3.0) < 1e-6);
    CHECK(std::abs(r.x_star[1] + 1.0) < 1e-6);
  }
}

TEST_CASE("non-finite objective mid-search yields a partial report") {
  Objective f = [](std::span<const double> x) {
    if (x[0] > 2.0) return std::numeric_limits<double>::infinity();
    return -(x[0] - 5.0) * (x[0] - 5.0);
  };
  try {
    bfgs_maximize(f, {0.0});
    FAIL("expected OptimizeError");
  } catch (const OptimizeError& e) {
    CHECK(e.code() == ErrorCode::EvaluationError);
    CHECK(e.partial().x_star.size() == 1);
    CHECK(e.partial().value >= f(std::vector<double>{0.0}));
  }
}

TEST_CASE("iteration cap") {
  Objective f = [](std::span<const double> x) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    return -(a * a + 100.0 * b * b);
  };
  BfgsOptions opt;
  opt.max_iter = 3;
  opt.gtol = 1e-12;
  auto r = bfgs_maximize(f, {-1.2, 1.0}, opt);
  CHECK(r.iterations <= 3);
  CHECK_FALSE(r.converged);
  CHECK(r.termination != Termination::GradientTol);
}
