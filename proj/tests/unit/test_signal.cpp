#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "gwvqa/error.hpp"
#include "gwvqa/signal.hpp"
#include "oracles.hpp"

using namespace gwvqa;

namespace {
std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> y(n);
  for (auto& v : y) v = g(rng);
  return y;
}
}  // namespace

TEST_CASE("delta input has flat spectrum dt") {
  TimeSeries ts({1.0, 0.0, 0.0, 0.0}, 4.0);
  auto fs = forward_dft(ts);
  REQUIRE(fs.size() == 4);
  CHECK(fs.delta_f == doctest::Approx(1.0));
  for (auto b : fs.bins) {
    CHECK(b.real() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(b.imag()) < 1e-15);
  }
}

TEST_CASE("constant input concentrates in bin 0") {
  const double c = 1.7;
  const std::size_t n = 16;
  TimeSeries ts(std::vector<double>(n, c), 8.0);
  auto fs = forward_dft(ts);
  CHECK(fs.bins[0].real() == doctest::Approx(c * n / 8.0).epsilon(1e-14));
  for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(fs.bins[k]) < 1e-13);
}

TEST_CASE("forward_dft matches the direct O(N^2) sum") {
  auto y = gaussian(64, 3);
  TimeSeries ts(y, 32.0);
  auto fs = forward_dft(ts);
  auto ref = oracle::brute_dft(y, 1.0 / 32.0);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(std::abs(fs.bins[k] - ref[k]) < 1e-12);
}

TEST_CASE("round trip, Parseval and conjugate symmetry") {
  for (std::size_t n : {2u, 7u, 64u, 1000u, 4096u}) {
    auto y = gaussian(n, n);
    TimeSeries ts(y, 256.0);
    auto fs = forward_dft(ts);
    auto back = inverse_dft(fs);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(back.samples()[i] - y[i]));
      scale = std::max(scale, std::abs(y[i]));
    }
    CHECK(err <= 1e-12 * scale);

    double time_energy = 0.0, freq_energy = 0.0;
    for (double v : y) time_energy += v * v * ts.delta_t();
    for (auto b : fs.bins) freq_energy += std::norm(b) * fs.delta_f;
    CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-10));

    for (std::size_t k = 1; k < n; ++k) {
      const auto d = fs.bins[n - k] - std::conj(fs.bins[k]);
      CHECK(std::abs(d) <= 1e-10 * std::max(1e-300, std::abs(fs.bins[k])) + 1e-14);
    }
  }
}

TEST_CASE("round trip for a long series") {
  const std::size_t n = std::size_t{1} << 20;
  auto y = gaussian(n, 11);
  TimeSeries ts(y, 4096.0);
  auto back = inverse_dft(forward_dft(ts));
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back.samples()[i] - y[i]));
  CHECK(err < 1e-10);
}

TEST_CASE("linearity") {
  auto a = gaussian(128, 1), b = gaussian(128, 2);
  std::vector<double> c(128);
  for (std::size_t i = 0; i < 128; ++i) c[i] = 2.5 * a[i] - 0.75 * b[i];
  auto fa = forward_dft(TimeSeries(a, 10.0));
  auto fb = forward_dft(TimeSeries(b, 10.0));
  auto fc = forward_dft(TimeSeries(c, 10.0));
  for (std::size_t k = 0; k < 128; ++k)
    CHECK(std::abs(fc.bins[k] - (2.5 * fa.bins[k] - 0.75 * fb.bins[k])) < 1e-12);
}

TEST_CASE("single bin inverse is a sampled exponential") {
  const std::size_t n = 32;
  const double f_s = 16.0;
  FrequencySeries fs{std::vector<cplx>(n), f_s / n, n, f_s};
  fs.bins[1] = 1.0;
  auto z = inverse_dft_complex(fs);
  for (std::size_t j = 0; j < n; ++j) {
    auto expect = fs.delta_f * std::polar(1.0, 2.0 * oracle::pi * j / n);
    CHECK(std::abs(z[j] - expect) < 1e-14);
  }
  fs.bins[n - 1] = 1.0;
  auto x = inverse_dft(fs);
  for (std::size_t j = 0; j < n; ++j)
    CHECK(x.samples()[j] == doctest::Approx(2.0 * fs.delta_f * std::cos(2.0 * oracle::pi * j / n)));

  FrequencySeries zero{std::vector<cplx>(n), f_s / n, n, f_s};
  const auto silent = inverse_dft(zero);
  for (double v : silent.samples()) CHECK(v == 0.0);
}

TEST_CASE("hann window") {
  auto w = hann_window(9);
  CHECK(w[0] == 0.0);
  CHECK(w[4] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[8] == doctest::Approx(0.0));
  for (std::size_t n : {16u, 17u, 1024u}) {
    auto h = hann_window(n);
    double direct = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = 0.5 * (1.0 - std::cos(2.0 * oracle::pi * j / (n - 1)));
      direct += c * c;
    }
    double sum = 0.0;
    for (double v : h) sum += v * v;
    CHECK(sum == doctest::Approx(direct).epsilon(1e-13));
    // 0.375 (n - 1) plus the endpoint term; both ends vanish so the adjustment is 0
    CHECK(sum == doctest::Approx(0.375 * (n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("segments") {
  std::vector<double> y(8);
  for (std::size_t i = 0; i < 8; ++i) y[i] = static_cast<double>(i);
  TimeSeries ts(y, 1.0);
  auto s = segments(ts, 4, 2);
  REQUIRE(s.size() == 3);
  CHECK(s[0].samples[0] == 0.0);
  CHECK(s[1].samples[0] == 2.0);
  CHECK(s[2].samples[0] == 4.0);
  CHECK(s[1].t0 == doctest::Approx(2.0));
  CHECK(segments(ts, 4, 0).size() == 2);
  CHECK(segments(ts, 3, 0).size() == 2);
  TimeSeries seven(std::vector<double>(7, 1.0), 1.0);
  CHECK(segments(seven, 4, 2).size() == 2);
  try {
    segments(seven, 8, 0);
    FAIL("expected EmptySegmentation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySegmentation);
  }
}

TEST_CASE("time series invariants are enforced") {
  CHECK_THROWS_AS(TimeSeries({1.0}, 1.0), Error);
  CHECK_THROWS_AS(TimeSeries({1.0, 2.0}, 0.0), Error);
  CHECK_THROWS_AS(TimeSeries({1.0, std::nan("")}, 1.0), Error);
}

TEST_CASE("strain files round trip") {
  auto dir = std::filesystem::temp_directory_path() / "gwvqa-test-strain";
  std::filesystem::create_directories(dir);
  TimeSeries ts(gaussian(100, 5), 512.0, 1234.5);
  write_strain(dir / "s", ts, "L1");
  auto back = read_strain(dir / "s.json");
  CHECK(back.detector == "L1");
  CHECK(back.series.f_s() == 512.0);
  CHECK(back.series.t0() == 1234.5);
  for (std::size_t i = 0; i < 100; ++i) CHECK(back.series.samples()[i] == ts.samples()[i]);

  write_strain_csv(dir / "s.csv", ts, "H1");
  auto csv = read_strain(dir / "s.csv");
  CHECK(csv.series.f_s() == 512.0);
  for (std::size_t i = 0; i < 100; ++i) CHECK(csv.series.samples()[i] == ts.samples()[i]);
  std::filesystem::remove_all(dir);
}
