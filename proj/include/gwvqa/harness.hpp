#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gwvqa/matched_filter.hpp"
#include "gwvqa/param_space.hpp"
#include "gwvqa/psd.hpp"
#include "gwvqa/vqa.hpp"

namespace gwvqa {

/// Analytic or tabulated one-sided noise PSD used to synthesize data.
///   flat:LEVEL
///   powerlaw:LEVEL:F0:S1[,S2...]   S(f) = LEVEL * sum_i (f/F0)^-S_i, f clamped to >= 10 Hz
///   aligo[:SCALE]                  zero-detuned high-power fit, S0 = 1e-49 * SCALE
///   file:PATH                      `f_Hz,S` CSV, log-interpolated
struct NoiseModel {
  enum class Kind { Flat, PowerLaw, Aligo, File };
  Kind kind = Kind::Aligo;
  double level = 1.0;
  double f0 = 100.0;
  std::vector<double> slopes;
  std::filesystem::path file;

  std::string describe() const;
};

NoiseModel parse_noise_model(const std::string& text);
// N/2 + 1 one-sided bins at delta_f = f_s / N.
Psd noise_psd(const NoiseModel& model, std::size_t N, double f_s);

struct InjectionSpec {
  MassParams params{1.3758, 1.3758};
  double amplitude = 12.0;   // target SNR A under the truth PSD
  double t_c = 40.0;
  NoiseModel noise;
  double noise_scale = 1.0;  // 0 gives a noiseless signal
  double duration = 64.0;
  double f_s = 2048.0;
  double f_low = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticData {
  TimeSeries series;
  Psd truth;
};

// Gaussian noise with E|n_k|^2 = S_k / (2 df), plus A h_k exp(-2 pi i f_k t_c).
SyntheticData synthesize_data(const InjectionSpec& spec);

enum class PsdSource { Truth, Estimate, File };

struct ExperimentConfig {
  std::string preset = "default";
  std::optional<std::filesystem::path> data_file;  // synthetic when empty
  InjectionSpec injection;
  PsdSource psd_source = PsdSource::Truth;
  std::filesystem::path psd_file;
  PsdSettings psd_settings;
  std::optional<double> t_c;  // defaults to the injection t_c
  Chart chart = Chart::Theta1Eta;
  double m_min = 1.0;
  double m_max = 5.0;
  unsigned q1 = 6;
  unsigned q2 = 6;
  bool align = true;
  std::optional<MassParams> align_to;  // defaults to the injected masses
  double f_low = 20.0;
  double rho0 = 8.0;
  std::vector<Variant> variants{Variant::QaoaHypercube, Variant::QaoaComplete,
                                Variant::QmoaComplete, Variant::QmoaCycle, Variant::Rdgs};
  std::vector<unsigned> depths;
  unsigned n_repeats = 10;
  std::uint64_t base_seed = 1;
  bool binary_cost = false;
  BfgsOptions bfgs;
  // Extra sweeps: each entry replaces (q1 = q2) or the chart for one pass.
  std::vector<unsigned> resolutions;
  std::vector<Chart> charts;
  std::filesystem::path output_dir = "gwvqa-out";
  std::optional<std::filesystem::path> cache_dir;  // defaults to output_dir/cache
  unsigned workers = 0;  // 0: hardware concurrency
  bool plots = true;

  double resolved_t_c() const { return t_c.value_or(injection.t_c); }
  MassParams resolved_align() const { return align_to.value_or(injection.params); }
  std::filesystem::path resolved_cache_dir() const {
    return cache_dir.value_or(output_dir / "cache");
  }
  void validate() const;
};

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

// Applies one `key = value` setting. Unknown keys and malformed values raise
// ConfigError. `preset` resets every other field.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> setting_keys();
std::string describe_config(const ExperimentConfig& cfg);

// "a..b", "a,b,c" or a single value.
std::vector<unsigned> parse_depths(const std::string& text);
// "64x64" -> (6, 6); sides must be powers of two.
std::pair<unsigned, unsigned> parse_grid_shape(const std::string& text);

/// Strain and the PSD used for filtering.
struct PreparedData {
  TimeSeries series;
  Psd psd;
  FrequencySeries spectrum;
  std::optional<Psd> truth;
};

PreparedData prepare_data(const ExperimentConfig& cfg);

// SHA-256 over everything the quality grid depends on.
std::string quality_digest(const PreparedData& data, const Grid& grid, double t_c, double f_low);

struct QualityResult {
  std::shared_ptr<const QualityGrid> quality;
  std::string digest;
  bool from_cache = false;
};

// Loads `{cache_dir}/quality-{digest}` when present, otherwise evaluates and stores it.
QualityResult cached_quality(const ExperimentConfig& cfg, const PreparedData& data,
                             const Grid& grid);
Grid experiment_grid(const ExperimentConfig& cfg, const PreparedData& data);

struct ExperimentRow {
  Chart chart = Chart::Theta1Eta;
  unsigned q1 = 0;
  unsigned q2 = 0;
  std::size_t marked = 0;
  RepeatStats stats;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::filesystem::path results_csv;
  std::filesystem::path runs_jsonl;
};

// Writes results.csv, runs.jsonl, per-variant final-probability tables and SVG
// plots under cfg.output_dir. Rows already written survive a later failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct DecompositionResult {
  QualityGrid data;
  QualityGrid signal;
  QualityGrid noise;
  cplx coefficient;
  std::array<double, 2> color_range{};
};

// Quality grids for y, its projection onto the template of `params` and the
// remainder, sharing one colour scale. rho is a modulus, so the three grids obey
// no additive identity.
DecompositionResult run_decomposition(const ExperimentConfig& cfg, const MassParams& params);

struct RdgsSummary {
  std::size_t J = 0;
  std::size_t marked = 0;
  unsigned depth = 0;
  double simulated = 0.0;
  double closed_form = 0.0;
};

// RDGS on the experiment's quality grid.
RdgsSummary rdgs_on_experiment(const ExperimentConfig& cfg, unsigned depth);
// RDGS on a 2^q-point register with the first `marked` points spread evenly.
RdgsSummary rdgs_synthetic(unsigned q, std::size_t marked, unsigned depth);

// Re-renders plots from an output directory and returns a text summary.
std::string render_report(const std::filesystem::path& dir);

}  // namespace gwvqa
