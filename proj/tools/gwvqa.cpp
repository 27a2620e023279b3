// Command-line front end. Talks to the library only through gwvqa.h.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gwvqa.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int exit_code_for(gwvqa_status s) {
  switch (s) {
    case GWVQA_OK: return 0;
    case GWVQA_INVALID_ARGUMENT:
    case GWVQA_CONFIG_ERROR:
    case GWVQA_UNPHYSICAL_COORDINATES:
    case GWVQA_DOMAIN_ERROR:
    case GWVQA_ALIGNMENT_ERROR:
    case GWVQA_DIMENSION_ERROR:
    case GWVQA_ARITY_ERROR:
    case GWVQA_TYPE_ERROR: return kExitConfig;
    case GWVQA_EMPTY_SEGMENTATION:
    case GWVQA_INSUFFICIENT_DATA:
    case GWVQA_FREQUENCY_RANGE:
    case GWVQA_BAND_EMPTY:
    case GWVQA_BAND_ERROR:
    case GWVQA_NORMALIZATION_ERROR:
    case GWVQA_NO_MARKED_STATES:
    case GWVQA_DATA_ERROR:
    case GWVQA_IO_ERROR: return kExitData;
    default: return kExitFailure;
  }
}

struct Failure {
  gwvqa_status status;
};

void check(gwvqa_status s) {
  if (s != GWVQA_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Config = Handle<gwvqa_config, gwvqa_config_free>;
using Series = Handle<gwvqa_timeseries, gwvqa_timeseries_free>;
using Spectrum = Handle<gwvqa_psd, gwvqa_psd_free>;
using Tmpl = Handle<gwvqa_template, gwvqa_template_free>;
using Quality = Handle<gwvqa_quality, gwvqa_quality_free>;
using Results = Handle<gwvqa_results, gwvqa_results_free>;

std::string config_get(const Config& cfg, const char* key) {
  size_t needed = 0;
  check(gwvqa_config_get(cfg.get(), key, nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(gwvqa_config_get(cfg.get(), key, buf.data(), buf.size(), nullptr));
  buf.resize(needed - 1);
  return buf;
}

std::string out_dir(const Config& cfg) { return config_get(cfg, "out"); }

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Flags shared by the subcommands that build an experiment configuration. Each
// maps onto one configuration key; `preset` is applied first.
struct Settings {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool binary_cost = false;
  CLI::Option* binary_flag = nullptr;
  bool no_plots = false;
  CLI::Option* no_plots_flag = nullptr;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  void register_on(CLI::App* app) {
    add(app, "--preset", "preset", "Experiment preset (default, fig8, fig10, fig11, fig12, gw170817, gw200115)");
    add(app, "--data", "data", "Strain file (.json/.bin/.csv); synthetic injection when omitted");
    add(app, "--psd", "psd", "PSD source: truth, estimate or a CSV path");
    add(app, "--psd-seg", "psd_seg", "Welch segment length in seconds");
    add(app, "--psd-method", "psd_method", "Welch average: median or mean");
    add(app, "--noise", "noise", "Noise model: flat:L, powerlaw:L:F0:S1[,S2], aligo[:SCALE], file:PATH");
    add(app, "--noise-scale", "noise_scale", "Multiplier on the synthetic noise (0 for noiseless)");
    add(app, "--noise-seed", "noise_seed", "Seed of the synthetic noise");
    add(app, "--a", "amplitude", "Injected SNR amplitude A");
    add(app, "--m1", "m1", "Injected primary mass [Msun]");
    add(app, "--m2", "m2", "Injected secondary mass [Msun]");
    add(app, "--t-c", "t_c", "Coalescence time [s]");
    add(app, "--duration", "duration", "Synthetic duration [s]");
    add(app, "--f-s", "f_s", "Synthetic sample rate [Hz]");
    add(app, "--f-low", "f_low", "Lower band edge [Hz]");
    add(app, "--chart", "chart", "Grid chart: m1m2, theta1eta, meta, theta1theta2");
    add(app, "--grid", "grid", "Grid shape AxB (powers of two)");
    add(app, "--m-min", "m_min", "Lower component-mass bound [Msun]");
    add(app, "--m-max", "m_max", "Upper component-mass bound [Msun]");
    add(app, "--align", "align", "Shift the grid so a point lands on the alignment masses (true/false)");
    add(app, "--align-m1", "align_m1", "Alignment primary mass [Msun]");
    add(app, "--align-m2", "align_m2", "Alignment secondary mass [Msun]");
    add(app, "--rho0", "rho0", "Success threshold on rho");
    add(app, "--variants", "variants", "Comma list: qaoa-hypercube, qaoa-complete, qmoa-complete, qmoa-cycle, rdgs");
    add(app, "--depths", "depths", "Depths as a..b or a comma list");
    add(app, "--repeats", "repeats", "Optimizer restarts per (variant, depth)");
    add(app, "--seed", "seed", "Base seed of the initial parameters");
    add(app, "--gtol", "gtol", "BFGS gradient tolerance");
    add(app, "--max-iter", "max_iter", "BFGS iteration cap");
    add(app, "--resolutions", "resolutions", "Comma list of per-register qubit counts to sweep");
    add(app, "--charts", "charts", "Comma list of charts to sweep");
    add(app, "--out", "out", "Output directory");
    add(app, "--cache", "cache", "Quality-grid cache directory");
    add(app, "--workers", "workers", "Worker threads (0: all cores)");
    binary_flag = app->add_flag("--binary-cost", binary_cost, "Optimize the thresholded 0/1 cost");
    no_plots_flag = app->add_flag("--no-plots", no_plots, "Skip SVG output");
  }

  void apply(Config& cfg) const {
    const auto preset = options.find("preset");
    if (preset->second->count() > 0) check(gwvqa_config_set(cfg.get(), "preset", values.at("preset").c_str()));
    for (const auto& [key, opt] : options)
      if (key != "preset" && opt->count() > 0)
        check(gwvqa_config_set(cfg.get(), key.c_str(), values.at(key).c_str()));
    if (binary_flag->count() > 0)
      check(gwvqa_config_set(cfg.get(), "binary_cost", binary_cost ? "true" : "false"));
    if (no_plots_flag->count() > 0 && no_plots) check(gwvqa_config_set(cfg.get(), "plots", "false"));
  }
};

void make_config(const Settings& s, Config& cfg) {
  check(gwvqa_config_new(nullptr, cfg.out()));
  s.apply(cfg);
}

int cmd_psd(const Settings& s) {
  Config cfg;
  make_config(s, cfg);
  if (s.options.at("psd")->count() == 0) check(gwvqa_config_set(cfg.get(), "psd", "estimate"));
  Series series;
  Spectrum psd;
  check(gwvqa_config_load_data(cfg.get(), series.out(), psd.out()));
  std::filesystem::create_directories(out_dir(cfg));
  const std::string path = join_path(out_dir(cfg), "psd.csv");
  check(gwvqa_psd_write(psd.get(), path.c_str()));
  std::printf("wrote %s (%zu bins, df = %.6g Hz)\n", path.c_str(), gwvqa_psd_size(psd.get()),
              gwvqa_psd_delta_f(psd.get()));
  return 0;
}

int cmd_template(const Settings& s, double m1, double m2) {
  Config cfg;
  make_config(s, cfg);
  Series series;
  Spectrum psd;
  check(gwvqa_config_load_data(cfg.get(), series.out(), psd.out()));
  const double f_low = std::stod(config_get(cfg, "f_low"));
  Tmpl t;
  check(gwvqa_template_new(m1, m2, gwvqa_timeseries_size(series.get()),
                           gwvqa_timeseries_sample_rate(series.get()), psd.get(), f_low, t.out()));
  size_t k_lo = 0, k_hi = 0;
  check(gwvqa_template_band(t.get(), &k_lo, &k_hi));
  std::filesystem::create_directories(out_dir(cfg));
  const std::string path = join_path(out_dir(cfg), "template.csv");
  check(gwvqa_template_write_csv(t.get(), path.c_str()));
  double rho = 0.0;
  check(gwvqa_snr_at(t.get(), series.get(), psd.get(), std::stod(config_get(cfg, "t_c")), &rho));
  std::printf("wrote %s (bins %zu..%zu); rho at t_c = %.6f\n", path.c_str(), k_lo, k_hi, rho);
  return 0;
}

int cmd_quality(const Settings& s) {
  Config cfg;
  make_config(s, cfg);
  Quality q;
  check(gwvqa_quality_from_config(cfg.get(), q.out()));
  size_t j1 = 0, j2 = 0;
  check(gwvqa_quality_dims(q.get(), &j1, &j2));
  const double* v = gwvqa_quality_values(q.get());
  size_t best = 0;
  for (size_t j = 1; j < j1 * j2; ++j)
    if (v[j] > v[best]) best = j;
  double x1 = 0.0, x2 = 0.0;
  check(gwvqa_quality_point(q.get(), best, &x1, &x2));
  std::filesystem::create_directories(out_dir(cfg));
  const std::string base = join_path(out_dir(cfg), "quality");
  check(gwvqa_quality_write(q.get(), base.c_str()));
  const double rho0 = std::stod(config_get(cfg, "rho0"));
  std::printf("wrote %s.json/.bin: %zux%zu grid, J_S = %zu (rho > %g), max rho = %.6f at (%.6g, %.6g)\n",
              base.c_str(), j1, j2, gwvqa_quality_count_above(q.get(), rho0), rho0, v[best], x1, x2);
  return 0;
}

std::string report_text(const std::string& dir) {
  size_t needed = 0;
  check(gwvqa_report(dir.c_str(), nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(gwvqa_report(dir.c_str(), buf.data(), buf.size(), nullptr));
  buf.resize(needed - 1);
  return buf;
}

int cmd_vqa(const Settings& s) {
  Config cfg;
  make_config(s, cfg);
  Results res;
  check(gwvqa_run_experiment(cfg.get(), res.out()));
  std::printf("%zu rows written to %s\n", gwvqa_results_count(res.get()),
              join_path(out_dir(cfg), "results.csv").c_str());
  std::fputs(report_text(out_dir(cfg)).c_str(), stdout);
  return 0;
}

int cmd_rdgs(const Settings& s, unsigned p, unsigned qubits, size_t marked) {
  double sim = 0.0, closed = 0.0;
  size_t J = 0, JS = 0;
  if (qubits > 0) {
    check(gwvqa_rdgs_synthetic(qubits, marked, p, &sim, &closed));
    J = size_t{1} << qubits;
    JS = marked;
  } else {
    Config cfg;
    make_config(s, cfg);
    check(gwvqa_rdgs_experiment(cfg.get(), p, &sim, &closed, &J, &JS));
  }
  std::printf("J = %zu, J_S = %zu, p = %u\nsimulated   = %.15f\nclosed form = %.15f\n|diff|      = %.3e\n",
              J, JS, p, sim, closed, std::abs(sim - closed));
  return 0;
}

int cmd_inject(const Settings& s) {
  Config cfg;
  make_config(s, cfg);
  std::filesystem::create_directories(out_dir(cfg));
  const std::string base = join_path(out_dir(cfg), "strain");
  check(gwvqa_inject(cfg.get(), base.c_str()));
  std::printf("wrote %s.json, %s.bin and %s-psd.csv\n", base.c_str(), base.c_str(), base.c_str());
  return 0;
}

int cmd_decompose(const Settings& s, double m1, double m2) {
  Config cfg;
  make_config(s, cfg);
  if (std::isnan(m1)) m1 = std::stod(config_get(cfg, "align_m1"));
  if (std::isnan(m2)) m2 = std::stod(config_get(cfg, "align_m2"));
  double re = 0.0, im = 0.0;
  check(gwvqa_run_decomposition(cfg.get(), m1, m2, &re, &im));
  std::printf("template (%.6g, %.6g): projection %.6f%+.6fi, |.| = %.6f\nwrote quality_{data,signal,noise} to %s\n",
              m1, m2, re, im, std::hypot(re, im), out_dir(cfg).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matched-filter quality grids and statevector variational search"};
  app.set_config("--config", "", "INI/TOML settings; [subcommand] sections, CLI flags override");
  app.require_subcommand(1);
  app.set_version_flag("--version", gwvqa_version());

  struct Sub {
    CLI::App* app;
    Settings settings;
  };
  std::map<std::string, Sub> subs;
  auto sub = [&](const std::string& name, const std::string& help) -> Sub& {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.settings.register_on(s.app);
    return s;
  };

  sub("psd", "Estimate the noise PSD and write psd.csv");
  Sub& tmpl = sub("template", "Generate a normalized template and write template.csv");
  double t_m1 = 1.3758, t_m2 = 1.3758;
  tmpl.app->add_option("--tm1", t_m1, "Template primary mass [Msun]")->capture_default_str();
  tmpl.app->add_option("--tm2", t_m2, "Template secondary mass [Msun]")->capture_default_str();
  sub("quality-grid", "Evaluate the quality grid");
  sub("vqa", "Run the depth sweep and write results.csv, runs.jsonl and plots");
  Sub& rdgs = sub("rdgs", "Restricted-depth Grover search: simulated vs closed form");
  unsigned rdgs_p = 15, rdgs_qubits = 0;
  size_t rdgs_marked = 1;
  rdgs.app->add_option("--p", rdgs_p, "Depth")->capture_default_str();
  rdgs.app->add_option("--qubits", rdgs_qubits, "Use a synthetic 2^q register instead of the quality grid");
  rdgs.app->add_option("--marked", rdgs_marked, "Marked points of the synthetic register")->capture_default_str();
  sub("inject", "Synthesize strain with an injected signal");
  Sub& dec = sub("decompose", "Signal/noise decomposition of the quality grid");
  double d_m1 = std::nan(""), d_m2 = std::nan("");
  dec.app->add_option("--tm1", d_m1, "Template primary mass [Msun] (default: alignment masses)");
  dec.app->add_option("--tm2", d_m2, "Template secondary mass [Msun]");
  CLI::App* report = app.add_subcommand("report", "Summarize an output directory and redraw plots");
  std::string report_dir = "gwvqa-out";
  report->add_option("--out", report_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (report->parsed()) {
      std::fputs(report_text(report_dir).c_str(), stdout);
      return 0;
    }
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      if (name == "psd") return cmd_psd(s.settings);
      if (name == "template") return cmd_template(s.settings, t_m1, t_m2);
      if (name == "quality-grid") return cmd_quality(s.settings);
      if (name == "vqa") return cmd_vqa(s.settings);
      if (name == "rdgs") return cmd_rdgs(s.settings, rdgs_p, rdgs_qubits, rdgs_marked);
      if (name == "inject") return cmd_inject(s.settings);
      if (name == "decompose") return cmd_decompose(s.settings, d_m1, d_m2);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "gwvqa: %s\n", gwvqa_last_error());
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gwvqa: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
