#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "gwvqa.h"

namespace fs = std::filesystem;

TEST_CASE("status names and errors") {
  CHECK(std::string(gwvqa_status_name(GWVQA_OK)) == "Ok");
  CHECK(std::strlen(gwvqa_version()) > 0);
  gwvqa_config* cfg = nullptr;
  CHECK(gwvqa_config_new("no-such-preset", &cfg) == GWVQA_CONFIG_ERROR);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(gwvqa_last_error()) > 0);
  CHECK(gwvqa_config_new(nullptr, &cfg) == GWVQA_OK);
  CHECK(std::strlen(gwvqa_last_error()) == 0);
  CHECK(gwvqa_config_set(cfg, "grid", "3x3") == GWVQA_CONFIG_ERROR);
  CHECK(gwvqa_config_set(nullptr, "grid", "8x8") == GWVQA_INVALID_ARGUMENT);
  gwvqa_config_free(cfg);
  gwvqa_config_free(nullptr);
}

TEST_CASE("config describe and get use caller buffers") {
  gwvqa_config* cfg = nullptr;
  REQUIRE(gwvqa_config_new("fig10", &cfg) == GWVQA_OK);
  REQUIRE(gwvqa_config_set(cfg, "rho0", "7.5") == GWVQA_OK);
  size_t needed = 0;
  CHECK(gwvqa_config_describe(cfg, nullptr, 0, &needed) == GWVQA_OK);
  CHECK(needed > 100);
  std::vector<char> buf(needed);
  CHECK(gwvqa_config_describe(cfg, buf.data(), buf.size(), &needed) == GWVQA_OK);
  CHECK(std::string(buf.data()).find("binary_cost = true") != std::string::npos);
  char small[8];
  CHECK(gwvqa_config_get(cfg, "rho0", small, sizeof small, &needed) == GWVQA_OK);
  CHECK(std::string(small) == "7.5");
  CHECK(gwvqa_config_get(cfg, "bogus", small, sizeof small, &needed) == GWVQA_CONFIG_ERROR);
  gwvqa_config_free(cfg);
}

TEST_CASE("matched filter through the C API") {
  gwvqa_config* cfg = nullptr;
  REQUIRE(gwvqa_config_new(nullptr, &cfg) == GWVQA_OK);
  gwvqa_config_set(cfg, "duration", "16");
  gwvqa_config_set(cfg, "t_c", "6");
  gwvqa_config_set(cfg, "amplitude", "20");
  gwvqa_config_set(cfg, "noise_scale", "0");
  gwvqa_timeseries* ts = nullptr;
  gwvqa_psd* psd = nullptr;
  REQUIRE(gwvqa_config_load_data(cfg, &ts, &psd) == GWVQA_OK);
  const size_t n = gwvqa_timeseries_size(ts);
  CHECK(n == 16 * 2048);
  CHECK(gwvqa_psd_size(psd) == n / 2 + 1);

  gwvqa_template* t = nullptr;
  REQUIRE(gwvqa_template_new(1.3758, 1.3758, n, 2048.0, psd, 20.0, &t) == GWVQA_OK);
  size_t lo = 0, hi = 0;
  CHECK(gwvqa_template_band(t, &lo, &hi) == GWVQA_OK);
  CHECK(lo == 320);
  double rho = 0.0;
  CHECK(gwvqa_snr_at(t, ts, psd, 6.0, &rho) == GWVQA_OK);
  CHECK(rho == doctest::Approx(20.0).epsilon(1e-8));
  std::vector<double> series(n);
  CHECK(gwvqa_snr_series(t, ts, psd, series.data(), 10) == GWVQA_INVALID_ARGUMENT);
  CHECK(gwvqa_snr_series(t, ts, psd, series.data(), n) == GWVQA_OK);
  CHECK(series[6 * 2048] == doctest::Approx(rho).epsilon(1e-8));

  gwvqa_template* bad = nullptr;
  CHECK(gwvqa_template_new(300.0, 300.0, n, 2048.0, psd, 20.0, &bad) == GWVQA_BAND_EMPTY);
  CHECK(bad == nullptr);
  CHECK(gwvqa_template_new(-1.0, 1.0, n, 2048.0, psd, 20.0, &bad) != GWVQA_OK);

  gwvqa_template_free(t);
  gwvqa_timeseries_free(ts);
  gwvqa_psd_free(psd);
  gwvqa_config_free(cfg);
}

TEST_CASE("strain and PSD files") {
  const auto dir = fs::temp_directory_path() / "gwvqa-capi-files";
  fs::create_directories(dir);
  std::vector<double> x(4096);
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.01 * i) + 1e-3 * std::cos(0.37 * i * i);
  gwvqa_timeseries* ts = nullptr;
  REQUIRE(gwvqa_timeseries_new(x.data(), x.size(), 256.0, 10.0, &ts) == GWVQA_OK);
  const std::string base = (dir / "strain").string();
  CHECK(gwvqa_timeseries_write(ts, base.c_str(), "L1") == GWVQA_OK);
  gwvqa_timeseries* back = nullptr;
  REQUIRE(gwvqa_timeseries_read((base + ".json").c_str(), &back) == GWVQA_OK);
  CHECK(gwvqa_timeseries_sample_rate(back) == 256.0);
  CHECK(std::memcmp(gwvqa_timeseries_data(back), x.data(), x.size() * sizeof(double)) == 0);

  gwvqa_psd* psd = nullptr;
  CHECK(gwvqa_psd_estimate(ts, 2.0, 0.5, "median", &psd) == GWVQA_OK);
  CHECK(gwvqa_psd_delta_f(psd) == 0.5);
  gwvqa_psd* none = nullptr;
  CHECK(gwvqa_psd_estimate(ts, 2.0, 0.5, "mode", &none) == GWVQA_CONFIG_ERROR);
  CHECK(gwvqa_psd_estimate(ts, 16.0, 0.0, "mean", &none) == GWVQA_INSUFFICIENT_DATA);
  const std::string path = (dir / "psd.csv").string();
  CHECK(gwvqa_psd_write(psd, path.c_str()) == GWVQA_OK);
  gwvqa_psd* read = nullptr;
  CHECK(gwvqa_psd_read(path.c_str(), &read) == GWVQA_OK);
  CHECK(gwvqa_psd_size(read) == gwvqa_psd_size(psd));
  gwvqa_psd* cond = nullptr;
  CHECK(gwvqa_psd_condition(read, 4096, 256.0, 20.0, &cond) == GWVQA_OK);
  CHECK(gwvqa_psd_size(cond) == 2049);
  CHECK(gwvqa_timeseries_read("/nonexistent.json", &back) == GWVQA_IO_ERROR);

  gwvqa_psd_free(cond);
  gwvqa_psd_free(read);
  gwvqa_psd_free(psd);
  gwvqa_timeseries_free(back);
  gwvqa_timeseries_free(ts);
  fs::remove_all(dir);
}

TEST_CASE("statevector primitives") {
  gwvqa_state* s = nullptr;
  REQUIRE(gwvqa_state_uniform(4, 4, &s) == GWVQA_OK);
  CHECK(gwvqa_state_size(s) == 16);
  std::vector<double> f(16, 0.0);
  f[5] = 1.0;
  for (int p = 0; p < 3; ++p) {
    CHECK(gwvqa_state_phase(s, M_PI, f.data(), f.size()) == GWVQA_OK);
    const double t = M_PI / 16.0;
    CHECK(gwvqa_state_mixer(s, "complete", &t, 1) == GWVQA_OK);
  }
  double e = 0.0;
  CHECK(gwvqa_state_expectation(s, f.data(), f.size(), &e) == GWVQA_OK);
  CHECK(e == doctest::Approx(gwvqa_grover_closed_form(16, 1, 3)).epsilon(1e-10));
  const double two[2] = {0.3, 0.4};
  CHECK(gwvqa_state_mixer(s, "cycle-per-dim", two, 2) == GWVQA_OK);
  CHECK(gwvqa_state_mixer(s, "cycle-per-dim", two, 1) == GWVQA_ARITY_ERROR);
  CHECK(gwvqa_state_mixer(s, "star", two, 1) == GWVQA_INVALID_ARGUMENT);
  CHECK(gwvqa_state_phase(s, 1.0, f.data(), 3) == GWVQA_DIMENSION_ERROR);
  std::vector<double> probs(16);
  CHECK(gwvqa_state_probabilities(s, probs.data(), probs.size()) == GWVQA_OK);
  double total = 0.0;
  for (double v : probs) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  gwvqa_state_free(s);

  double sim = 0.0, closed = 0.0;
  CHECK(gwvqa_rdgs_synthetic(10, 3, 7, &sim, &closed) == GWVQA_OK);
  CHECK(sim == doctest::Approx(closed).epsilon(1e-10));
  CHECK(gwvqa_rdgs_synthetic(10, 0, 7, &sim, &closed) == GWVQA_NO_MARKED_STATES);
}

TEST_CASE("experiment through the C API") {
  const auto dir = fs::temp_directory_path() / "gwvqa-capi-run";
  fs::remove_all(dir);
  gwvqa_config* cfg = nullptr;
  REQUIRE(gwvqa_config_new(nullptr, &cfg) == GWVQA_OK);
  for (auto [k, v] : {std::pair{"duration", "16"}, {"t_c", "9"}, {"grid", "8x8"},
                      {"depths", "1..2"}, {"repeats", "2"}, {"amplitude", "14"},
                      {"variants", "qaoa-complete,rdgs"}, {"workers", "1"}, {"plots", "false"}})
    REQUIRE(gwvqa_config_set(cfg, k, v) == GWVQA_OK);
  REQUIRE(gwvqa_config_set(cfg, "out", dir.string().c_str()) == GWVQA_OK);

  gwvqa_quality* q = nullptr;
  REQUIRE(gwvqa_quality_from_config(cfg, &q) == GWVQA_OK);
  size_t j1 = 0, j2 = 0;
  gwvqa_quality_dims(q, &j1, &j2);
  CHECK(j1 == 8);
  CHECK(j2 == 8);
  const size_t marked = gwvqa_quality_count_above(q, 8.0);
  CHECK(marked >= 1);
  double x1 = 0, x2 = 0;
  CHECK(gwvqa_quality_point(q, 0, &x1, &x2) == GWVQA_OK);
  CHECK(gwvqa_quality_point(q, 64, &x1, &x2) == GWVQA_INVALID_ARGUMENT);

  gwvqa_results* r = nullptr;
  REQUIRE(gwvqa_run_experiment(cfg, &r) == GWVQA_OK);
  CHECK(gwvqa_results_count(r) == 4);
  gwvqa_row row{};
  CHECK(gwvqa_results_row(r, 3, &row) == GWVQA_OK);
  CHECK(std::string(row.variant) == "rdgs");
  CHECK(row.marked == marked);
  CHECK(row.mean_success == doctest::Approx(gwvqa_grover_closed_form(64, marked, 2)).epsilon(1e-10));
  CHECK(gwvqa_results_row(r, 4, &row) == GWVQA_INVALID_ARGUMENT);

  double sim = 0, closed = 0;
  size_t J = 0, js = 0;
  CHECK(gwvqa_rdgs_experiment(cfg, 3, &sim, &closed, &J, &js) == GWVQA_OK);
  CHECK(J == 64);
  CHECK(js == marked);
  CHECK(sim == doctest::Approx(closed).epsilon(1e-10));

  size_t needed = 0;
  CHECK(gwvqa_report(dir.string().c_str(), nullptr, 0, &needed) == GWVQA_OK);
  CHECK(needed > 1);
  CHECK(gwvqa_report("/nonexistent-dir", nullptr, 0, &needed) == GWVQA_DATA_ERROR);

  gwvqa_results_free(r);
  gwvqa_quality_free(q);
  gwvqa_config_free(cfg);
  fs::remove_all(dir);
}
