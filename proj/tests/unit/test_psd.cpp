#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "gwvqa/error.hpp"
#include "gwvqa/harness.hpp"
#include "gwvqa/psd.hpp"
#include "oracles.hpp"

using namespace gwvqa;

namespace {
TimeSeries white(double sigma, double f_s, double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> y(static_cast<std::size_t>(f_s * seconds));
  for (auto& v : y) v = g(rng);
  return TimeSeries(std::move(y), f_s);
}
}  // namespace

TEST_CASE("white noise level is 2 sigma^2 / f_s") {
  auto ts = white(1.0, 2048.0, 64.0, 42);
  for (auto method : {PsdMethod::Mean, PsdMethod::Median}) {
    auto psd = estimate_psd(ts, {4.0, 0.5, method});
    CHECK(psd.size() == 4 * 2048 / 2 + 1);
    CHECK(psd.delta_f() == doctest::Approx(0.25));
    double avg = 0.0;
    for (std::size_t k = 1; k + 1 < psd.size(); ++k) avg += psd[k];
    avg /= static_cast<double>(psd.size() - 2);
    CHECK(avg == doctest::Approx(2.0 / 2048.0).epsilon(0.10));
  }
}

TEST_CASE("sinusoid at a bin centre") {
  const double f_s = 1024.0, seg = 2.0;
  const double f0 = 100.0;  // bin 200 of a 2 s segment
  std::vector<double> y(static_cast<std::size_t>(16 * f_s));
  for (std::size_t n = 0; n < y.size(); ++n) y[n] = std::sin(2.0 * oracle::pi * f0 * n / f_s);
  auto psd = estimate_psd(TimeSeries(y, f_s), {seg, 0.5, PsdMethod::Mean});
  const std::size_t k0 = 200;
  std::size_t peak = 0;
  for (std::size_t k = 0; k < psd.size(); ++k)
    if (psd[k] > psd[peak]) peak = k;
  CHECK(peak == k0);
  // The Hann main lobe spans k0 +- 1; everything outside is sidelobe.
  for (std::size_t k = 0; k < psd.size(); ++k) {
    if (k + 1 >= k0 && k <= k0 + 1) continue;
    CHECK(10.0 * std::log10(psd[k0] / psd[k]) >= 60.0);
  }
}

TEST_CASE("constant input keeps its power at DC") {
  // a trace of white noise keeps every bin strictly positive
  const auto trace = white(1e-9, 256.0, 16.0, 3);
  std::vector<double> y(trace.samples().begin(), trace.samples().end());
  for (auto& v : y) v += 3.0;
  auto psd = estimate_psd(TimeSeries(y, 256.0), {2.0, 0.5, PsdMethod::Mean});
  double total = 0.0;
  for (double v : psd.values()) total += v;
  // the window's own transform leaks into bin 1
  CHECK((psd[0] + psd[1]) / total >= 0.999);
  CHECK(psd[0] > psd[1]);
}

TEST_CASE("estimate scales exactly with a^2") {
  auto ts = white(1.0, 512.0, 32.0, 9);
  std::vector<double> scaled(ts.samples().begin(), ts.samples().end());
  for (auto& v : scaled) v *= 4.0;
  for (auto method : {PsdMethod::Mean, PsdMethod::Median}) {
    auto a = estimate_psd(ts, {2.0, 0.5, method});
    auto b = estimate_psd(TimeSeries(scaled, 512.0), {2.0, 0.5, method});
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(b[k] == 16.0 * a[k]);
  }
}

TEST_CASE("insufficient data and bad settings") {
  auto ts = white(1.0, 256.0, 4.0, 1);
  try {
    estimate_psd(ts, {4.0, 0.0, PsdMethod::Mean});
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
  CHECK_THROWS_AS(estimate_psd(ts, {0.01, 0.5, PsdMethod::Mean}), Error);
  CHECK_THROWS_AS(estimate_psd(ts, {1.0, 1.0, PsdMethod::Mean}), Error);
}

TEST_CASE("median bias matches its defining series") {
  CHECK(median_bias(1) == doctest::Approx(1.0));
  for (std::size_t n : {3u, 5u, 31u, 127u}) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) sum += ((i % 2) ? 1.0 : -1.0) / static_cast<double>(i);
    CHECK(median_bias(n) == doctest::Approx(sum));
  }
  CHECK(median_bias(10000) == doctest::Approx(std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("coloured noise estimate tracks the generating PSD") {
  InjectionSpec spec;
  spec.amplitude = 0.0;
  spec.duration = 256.0;
  spec.f_s = 2048.0;
  spec.seed = 77;
  auto data = synthesize_data(spec);
  // 1023 averaged half-second segments
  auto est = estimate_psd(data.series, {0.5, 0.5, PsdMethod::Mean});
  auto truth = noise_psd(spec.noise, 1024, spec.f_s);
  REQUIRE(truth.size() == est.size());
  std::size_t checked = 0;
  for (std::size_t k = 0; k < est.size(); ++k) {
    const double f = k * est.delta_f();
    if (f < 20.0 || f > 0.8 * 1024.0) continue;
    CHECK(est[k] / truth[k] == doctest::Approx(1.0).epsilon(0.15));
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("condition_psd") {
  SUBCASE("identity on the same grid") {
    std::vector<double> s(129);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = 1.0 + k;
    Psd psd(s, 0.5);
    auto out = condition_psd(psd, 256, 128.0, 1e-300, 0.0);
    REQUIRE(out.size() == 129);
    for (std::size_t k = 0; k < 129; ++k) CHECK(out[k] == doctest::Approx(s[k]).epsilon(1e-13));
  }
  SUBCASE("exact for log-linear input") {
    std::vector<double> s(65);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::exp(-0.1 * k);
    Psd psd(s, 1.0);
    auto out = condition_psd(psd, 512, 128.0, 1e-300, 0.0);
    REQUIRE(out.size() == 257);
    for (std::size_t k = 0; k < out.size(); ++k)
      CHECK(out[k] == doctest::Approx(std::exp(-0.1 * k * 0.25)).epsilon(1e-12));
  }
  SUBCASE("flat stays flat and low bins are floored") {
    Psd flat(std::vector<double>(33, 2e-46), 2.0);
    auto out = condition_psd(flat, 64, 64.0);
    for (double v : out.values()) CHECK(v == doctest::Approx(2e-46));
    std::vector<double> s(33, 1.0);
    s[1] = 1e-12;
    auto floored = condition_psd(Psd(s, 2.0), 32, 64.0, 1e-3, 20.0);
    CHECK(floored[1] >= 1e-3);
  }
  SUBCASE("target above Nyquist") {
    Psd psd(std::vector<double>(33, 1.0), 1.0);  // Nyquist 32 Hz
    try {
      condition_psd(psd, 128, 128.0);
      FAIL("expected FrequencyRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FrequencyRange);
    }
  }
}

TEST_CASE("psd csv round trip") {
  auto path = std::filesystem::temp_directory_path() / "gwvqa-test-psd.csv";
  std::vector<double> s{1e-46, 3e-47, 2.5e-47, 9e-47};
  write_psd_csv(path, Psd(s, 0.25), PsdSettings{});
  auto back = read_psd_csv(path);
  CHECK(back.delta_f() == doctest::Approx(0.25));
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(back[k] == s[k]);
  std::filesystem::remove(path);
}

TEST_CASE("Psd rejects nonpositive values") {
  CHECK_THROWS_AS(Psd({1.0, 0.0}, 1.0), Error);
  CHECK_THROWS_AS(Psd({1.0, -1.0}, 1.0), Error);
  CHECK_THROWS_AS(Psd({1.0}, 1.0), Error);
}
