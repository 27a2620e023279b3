#include <doctest.h>

#include <cmath>
#include <random>

#include "gwvqa/error.hpp"
#include "gwvqa/harness.hpp"
#include "gwvqa/param_space.hpp"
#include "oracles.hpp"

using namespace gwvqa;

namespace {
double theta1_direct(double m1, double m2, double f_s) {
  const double M = m1 + m2, eta = m1 * m2 / (M * M);
  return 5.0 / 128.0 * std::pow(oracle::pi * M * 4.92549e-6 * f_s, -5.0 / 3.0) / eta;
}
}  // namespace

TEST_CASE("chart values quoted for the two events") {
  const CoordChart c{Chart::Theta1Eta, 4096.0};
  auto bns = to_chart({1.3758, 1.3758}, c);
  CHECK(bns[0] == doctest::Approx(2.87).epsilon(0.01));
  CHECK(bns[1] == 0.25);
  auto nsbh = to_chart({7.58, 1.33}, c);
  CHECK(nsbh[0] == doctest::Approx(0.797).epsilon(0.01));
  CHECK(nsbh[1] == doctest::Approx(0.127).epsilon(0.01));
  CHECK(bns[0] == doctest::Approx(theta1_direct(1.3758, 1.3758, 4096.0)).epsilon(1e-5));

  auto back = from_chart(bns, c);
  CHECK(back.m1 == doctest::Approx(1.3758).epsilon(1e-12));
  CHECK(back.m2 == doctest::Approx(1.3758).epsilon(1e-12));
}

TEST_CASE("M1M2 is the identity and eta = 0.25 gives equal masses") {
  auto c = to_chart({2.5, 1.5}, {Chart::M1M2, 4096.0});
  CHECK(c[0] == 2.5);
  CHECK(c[1] == 1.5);
  for (Chart ch : {Chart::Theta1Eta, Chart::MEta}) {
    auto p = from_chart(to_chart({1.7, 1.7}, {ch, 2048.0}), {ch, 2048.0});
    CHECK(p.m1 == p.m2);
  }
}

TEST_CASE("chart round trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> m(1.0, 5.0);
  for (Chart ch : {Chart::M1M2, Chart::Theta1Eta, Chart::MEta, Chart::Theta1Theta2}) {
    const CoordChart c{ch, 2048.0};
    for (int i = 0; i < 1000; ++i) {
      double a = m(rng), b = m(rng);
      if (ch != Chart::M1M2 && a < b) std::swap(a, b);
      const auto x = to_chart({a, b}, c);
      const auto x2 = to_chart(from_chart(x, c), c);
      for (int d = 0; d < 2; ++d) CHECK(x2[d] == doctest::Approx(x[d]).epsilon(1e-10));
    }
  }
}

TEST_CASE("chart domain errors") {
  const CoordChart c{Chart::Theta1Eta, 4096.0};
  try {
    from_chart({2.0, 0.26}, c);
    FAIL("expected UnphysicalCoordinates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnphysicalCoordinates);
  }
  try {
    from_chart({-1.0, 0.2}, c);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("grid box from the mass region") {
  const CoordChart c{Chart::Theta1Eta, 2048.0};
  auto g = build_grid(1.0, 5.0, 8, 8, c);
  CHECK(g.dims[0] == 256);
  CHECK(g.dims[1] == 256);
  CHECK(g.size() == 65536);
  CHECK(g.lo[1] == doctest::Approx(5.0 / 36.0).epsilon(1e-12));
  CHECK(g.hi[1] == doctest::Approx(0.25).epsilon(1e-12));
  // theta1 extremes: lightest equal-mass and heaviest equal-mass corners
  CHECK(g.hi[0] == doctest::Approx(to_chart({1.0, 1.0}, c)[0]).epsilon(1e-12));
  CHECK(g.lo[0] == doctest::Approx(to_chart({5.0, 5.0}, c)[0]).epsilon(1e-12));
  auto p = g.point(3, 5);
  CHECK(p[0] == doctest::Approx(g.lo[0] + (g.hi[0] - g.lo[0]) * 3.0 / 255.0));
  CHECK(p[1] == doctest::Approx(g.lo[1] + (g.hi[1] - g.lo[1]) * 5.0 / 255.0));
  CHECK(g.index(3, 5) == 3 * 256 + 5);
}

TEST_CASE("aligned grid contains the target exactly") {
  for (Chart ch : {Chart::Theta1Eta, Chart::MEta, Chart::Theta1Theta2, Chart::M1M2}) {
    const CoordChart c{ch, 4096.0};
    const MassParams target{1.3758, 1.3758};
    auto g = build_grid(1.0, 5.0, 8, 8, c, target);
    REQUIRE(g.aligned_to.has_value());
    const auto want = to_chart(target, c);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto p = g.point(j);
      best = std::min(best, std::hypot(p[0] - want[0], p[1] - want[1]));
    }
    CHECK(best == 0.0);
    const auto s0 = g.step();
    const auto plain = build_grid(1.0, 5.0, 8, 8, c);
    CHECK(s0[0] == doctest::Approx(plain.step()[0]).epsilon(1e-12));
    CHECK(std::abs(g.lo[0] - plain.lo[0]) <= 0.5 * s0[0] * (1 + 1e-9));
  }
  try {
    build_grid(1.0, 5.0, 4, 4, {Chart::Theta1Eta, 4096.0}, MassParams{30.0, 30.0});
    FAIL("expected AlignmentError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AlignmentError);
  }
}

TEST_CASE("theta1-eta grids favour low total mass") {
  const CoordChart c{Chart::Theta1Eta, 2048.0};
  auto g = build_grid(1.0, 5.0, 6, 6, c);
  std::size_t below = 0, above = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto x = g.point(j);
    if (x[1] > 0.25) continue;
    const double M = from_chart(x, c).total();
    (M < 6.0 ? below : above)++;
  }
  CHECK(below > above);
}

namespace {
struct QualityFixture {
  InjectionSpec spec;
  SyntheticData data;
  FrequencySeries y;
  Grid grid;
  static InjectionSpec make(double noise_scale) {
    InjectionSpec s;
    s.duration = 16.0;
    s.t_c = 9.0;
    s.amplitude = 20.0;
    s.noise_scale = noise_scale;
    return s;
  }

  explicit QualityFixture(double noise_scale)
      : spec(make(noise_scale)),
        data(synthesize_data(spec)),
        y(forward_dft(data.series)),
        grid(build_grid(1.0, 5.0, 3, 3, {Chart::Theta1Eta, spec.f_s}, spec.params)) {}
};
}  // namespace

TEST_CASE("noiseless quality grid peaks at the aligned point") {
  QualityFixture fx(0.0);
  auto q = evaluate_quality(fx.grid, fx.y, fx.data.truth, fx.spec.t_c, 20.0, 8.0, 1);
  const std::size_t anchor = fx.grid.index(fx.grid.anchor[0], fx.grid.anchor[1]);
  const auto top = std::max_element(q.values.begin(), q.values.end()) - q.values.begin();
  CHECK(static_cast<std::size_t>(top) == anchor);
  CHECK(q.values[anchor] == doctest::Approx(20.0).epsilon(1e-8));
  for (double v : q.values) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  std::size_t unphysical = 0;
  for (std::size_t j = 0; j < q.size(); ++j) unphysical += fx.grid.point(j)[1] > 0.25;
  CHECK(q.degenerate == unphysical);
}

TEST_CASE("quality grid re-evaluation and schedule independence") {
  QualityFixture fx(1.0);
  auto q1 = evaluate_quality(fx.grid, fx.y, fx.data.truth, fx.spec.t_c, 20.0, 8.0, 1);
  auto q3 = evaluate_quality(fx.grid, fx.y, fx.data.truth, fx.spec.t_c, 20.0, 8.0, 3);
  CHECK(q1.values == q3.values);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, q1.size() - 1);
  int checked = 0;
  while (checked < 8) {
    const std::size_t j = pick(rng);
    const auto x = fx.grid.point(j);
    if (x[1] > 0.25) continue;
    auto t = generate_template(from_chart(x, fx.grid.chart), fx.y.size(), fx.spec.f_s,
                               fx.data.truth, 20.0);
    CHECK(q1.values[j] == snr_at(t, fx.y, fx.data.truth, fx.spec.t_c));
    ++checked;
  }
  CHECK(q1.marked == count_above(q1.values, 8.0));
}

TEST_CASE("binarize") {
  QualityGrid q;
  q.values = {0.5, 9.0, 8.0, 12.0, 3.0};
  q.grid.dims = {1, 5};
  auto b = binarize(q, 8.0);
  CHECK(b.binary);
  CHECK(b.values == std::vector<double>{0.0, 1.0, 0.0, 1.0, 0.0});
  CHECK(b.marked == 2);
  std::size_t brute = 0;
  for (double v : q.values) brute += v > 8.0;
  CHECK(b.marked == brute);
  CHECK(binarize(q, 100.0).marked == 0);
  CHECK(binarize(q, -1.0).marked == 5);
  try {
    binarize(b, 1.0);
    FAIL("expected TypeError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TypeError);
  }
}

TEST_CASE("quality grid file round trip") {
  QualityFixture fx(1.0);
  auto q = evaluate_quality(fx.grid, fx.y, fx.data.truth, fx.spec.t_c, 20.0, 8.0, 1);
  auto base = std::filesystem::temp_directory_path() / "gwvqa-test-quality";
  write_quality_grid(base, q, "abc", std::array<double, 2>{0.0, 25.0});
  auto back = read_quality_grid(base);
  CHECK(back.digest == "abc");
  CHECK(back.grid.values == q.values);
  CHECK(back.grid.grid.anchor == q.grid.anchor);
  CHECK(back.grid.grid.point(17) == q.grid.point(17));
  CHECK(back.vmax == 25.0);
  std::filesystem::remove(base.string() + ".json");
  std::filesystem::remove(base.string() + ".bin");
}
