#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gwvqa/error.hpp"
#include "gwvqa/harness.hpp"

using namespace gwvqa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("gwvqa-test-" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg = preset_config("default");
  apply_setting(cfg, "duration", "16");
  apply_setting(cfg, "t_c", "9");
  apply_setting(cfg, "grid", "8x8");
  apply_setting(cfg, "depths", "1..2");
  apply_setting(cfg, "repeats", "2");
  apply_setting(cfg, "workers", "1");
  apply_setting(cfg, "amplitude", "14");
  apply_setting(cfg, "out", out.string());
  return cfg;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Drops the trailing wall-time column.
std::string without_wall_time(const std::string& line) { return line.substr(0, line.rfind(',')); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("noise models") {
  auto flat = parse_noise_model("flat:1e-40");
  auto psd = noise_psd(flat, 64, 64.0);
  CHECK(psd.size() == 33);
  for (double v : psd.values()) CHECK(v == 1e-40);
  auto pl = parse_noise_model("powerlaw:2:100:1,2");
  auto p2 = noise_psd(pl, 1024, 1024.0);
  CHECK(p2[200] == doctest::Approx(2.0 * (0.5 + 0.25)));
  CHECK(p2[5] == p2[10]);  // clamped below 10 Hz
  auto al = noise_psd(parse_noise_model("aligo"), 4096, 2048.0);
  const double x = 1.0;  // bin 430 sits at 215 Hz
  CHECK(al[430] == doctest::Approx(1e-49 * (std::pow(x, -4.14) - 5.0 / (x * x) +
                                            111.0 * (1 - x * x + x * x * x * x / 2) / (1 + x * x / 2))));
  CHECK(code_of([] { parse_noise_model("pink:3"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_noise_model("flat:-1"); }) == ErrorCode::ConfigError);
}

TEST_CASE("synthesized data") {
  InjectionSpec spec;
  spec.duration = 16.0;
  spec.t_c = 5.0;
  spec.amplitude = 20.0;
  spec.noise_scale = 0.0;
  auto data = synthesize_data(spec);
  CHECK(data.series.size() == 16 * 2048);
  auto y = forward_dft(data.series);
  auto h = generate_template(spec.params, y.size(), spec.f_s, data.truth, spec.f_low);
  CHECK(snr_at(h, y, data.truth, spec.t_c) == doctest::Approx(20.0).epsilon(1e-8));

  spec.noise_scale = 1.0;
  auto a = synthesize_data(spec);
  auto b = synthesize_data(spec);
  CHECK(std::equal(a.series.samples().begin(), a.series.samples().end(), b.series.samples().begin()));
  spec.seed = 2;
  auto c = synthesize_data(spec);
  CHECK_FALSE(std::equal(a.series.samples().begin(), a.series.samples().end(), c.series.samples().begin()));

  spec.duration = 10.0;
  CHECK(code_of([&] { synthesize_data(spec); }) == ErrorCode::ConfigError);
}

TEST_CASE("configuration keys") {
  ExperimentConfig cfg = preset_config("default");
  CHECK(cfg.depths.size() == 15);
  CHECK(cfg.q1 == 6);
  CHECK(cfg.rho0 == 8.0);
  CHECK(cfg.injection.amplitude == 12.0);
  CHECK(preset_config("fig10").binary_cost);
  CHECK(preset_config("fig12").charts.size() == 4);
  apply_setting(cfg, "grid", "128x32");
  CHECK(cfg.q1 == 7);
  CHECK(cfg.q2 == 5);
  apply_setting(cfg, "p", "3,5,9");
  CHECK(cfg.depths == std::vector<unsigned>{3, 5, 9});
  apply_setting(cfg, "variants", "qaoa-complete,rdgs");
  CHECK(cfg.variants.size() == 2);
  apply_setting(cfg, "binary-cost", "true");
  CHECK(cfg.binary_cost);
  apply_setting(cfg, "chart", "meta");
  CHECK(cfg.chart == Chart::MEta);

  CHECK(code_of([&] { apply_setting(cfg, "grid", "100x100"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_setting(cfg, "rho0", "eight"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_setting(cfg, "depths", "5..2"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_setting(cfg, "no_such_key", "1"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_setting(cfg, "chart", "polar"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_setting(cfg, "preset", "fig99"); }) == ErrorCode::ConfigError);
  CHECK(parse_depths("2..4") == std::vector<unsigned>{2, 3, 4});
  CHECK(parse_grid_shape("256x256") == std::pair<unsigned, unsigned>{8, 8});
}

TEST_CASE("describe_config round trips through apply_setting") {
  ExperimentConfig cfg = preset_config("fig11");
  apply_setting(cfg, "amplitude", "13.25");
  apply_setting(cfg, "noise", "powerlaw:1e-46:100:4,0");
  apply_setting(cfg, "psd", "estimate");
  apply_setting(cfg, "out", "/tmp/x");
  const std::string text = describe_config(cfg);
  ExperimentConfig copy = preset_config("default");
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    REQUIRE(eq != std::string::npos);
    const std::string key = line.substr(0, eq), value = line.substr(eq + 3);
    if (key == "data" && value == "synthetic") continue;
    apply_setting(copy, key, value);
  }
  CHECK(describe_config(copy) == text);
}

TEST_CASE("quality cache returns bitwise identical grids") {
  const auto out = scratch("cache");
  auto cfg = small_config(out);
  auto data = prepare_data(cfg);
  auto grid = experiment_grid(cfg, data);
  auto first = cached_quality(cfg, data, grid);
  CHECK_FALSE(first.from_cache);
  auto second = cached_quality(cfg, data, grid);
  CHECK(second.from_cache);
  CHECK(second.digest == first.digest);
  CHECK(second.quality->values == first.quality->values);
  CHECK(second.quality->marked == first.quality->marked);

  auto fresh = evaluate_quality(grid, data.spectrum, data.psd, cfg.resolved_t_c(), cfg.f_low,
                                cfg.rho0, 1);
  CHECK(fresh.values == first.quality->values);

  apply_setting(cfg, "t_c", "9.5");
  auto moved = cached_quality(cfg, prepare_data(cfg), grid);
  CHECK_FALSE(moved.from_cache);
  CHECK(moved.digest != first.digest);
  fs::remove_all(out);
}

TEST_CASE("experiment output is deterministic") {
  const auto out_a = scratch("run-a"), out_b = scratch("run-b");
  auto cfg_a = small_config(out_a);
  auto cfg_b = small_config(out_b);
  apply_setting(cfg_b, "workers", "3");
  auto ra = run_experiment(cfg_a);
  auto rb = run_experiment(cfg_b);
  CHECK(ra.rows.size() == 5 * 2);
  auto la = lines_of(ra.results_csv), lb = lines_of(rb.results_csv);
  REQUIRE(la.size() == 11);
  REQUIRE(la.size() == lb.size());
  CHECK(la[0] ==
        "chart,q1,q2,marked,variant,depth,n_repeats,mean_expectation,std_expectation,mean_success,"
        "std_success,mean_iters,mean_wall_s");
  for (std::size_t i = 1; i < la.size(); ++i) CHECK(without_wall_time(la[i]) == without_wall_time(lb[i]));
  CHECK(lines_of(ra.runs_jsonl).size() == 4 * 2 * 2 + 2);
  CHECK(fs::exists(out_a / "final_prob_qaoa-complete_p2.csv"));
  CHECK(fs::exists(out_a / "success.svg"));
  CHECK(fs::exists(out_a / "config.ini"));

  const std::string report = render_report(out_a);
  CHECK(report.find("rdgs") != std::string::npos);
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("rdgs helpers agree with the closed form") {
  for (unsigned p : {0u, 4u, 15u}) {
    auto s = rdgs_synthetic(12, 5, p);
    CHECK(s.J == 4096);
    CHECK(s.simulated == doctest::Approx(s.closed_form).epsilon(1e-10));
    CHECK(s.closed_form == doctest::Approx(grover_closed_form(4096, 5, p)));
  }
}

TEST_CASE("decomposition grids share a colour range") {
  const auto out = scratch("decomp");
  auto cfg = small_config(out);
  auto d = run_decomposition(cfg, cfg.injection.params);
  CHECK(d.color_range[0] <= d.color_range[1]);
  for (const auto* g : {&d.data, &d.signal, &d.noise})
    for (double v : g->values) CHECK(v <= d.color_range[1]);
  const auto top = std::max_element(d.signal.values.begin(), d.signal.values.end()) - d.signal.values.begin();
  const auto& grid = d.signal.grid;
  CHECK(static_cast<std::size_t>(top) == grid.index(grid.anchor[0], grid.anchor[1]));
  CHECK(fs::exists(out / "quality_signal.json"));
  fs::remove_all(out);
}

TEST_CASE("missing data files are data errors") {
  auto cfg = preset_config("default");
  apply_setting(cfg, "data", "/nonexistent/strain.json");
  apply_setting(cfg, "psd", "estimate");
  CHECK(code_of([&] { prepare_data(cfg); }) == ErrorCode::DataError);
}
