#include "gwvqa/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gwvqa/error.hpp"
#include "gwvqa/parallel.hpp"
#include "gwvqa/svg.hpp"

namespace gwvqa {

namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    fail(ErrorCode::ConfigError, key + ": expected a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorCode::ConfigError, key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  fail(ErrorCode::ConfigError, key + ": expected a boolean, got '" + text + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& items, Fn&& fn, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += fn(items[i]);
  }
  return out;
}

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

unsigned log2_exact(std::uint64_t v) {
  unsigned q = 0;
  while ((std::uint64_t{1} << q) < v) ++q;
  return q;
}

// Analytic zero-detuned high-power fit, x = f / 215 Hz.
double aligo_fit(double f) {
  const double x = std::max(f, 10.0) / 215.0;
  const double x2 = x * x;
  return std::pow(x, -4.14) - 5.0 / x2 + 111.0 * (1.0 - x2 + 0.5 * x2 * x2) / (1.0 + 0.5 * x2);
}

}  // namespace

// ---------------------------------------------------------------------------
// Noise models and synthesis

std::string NoiseModel::describe() const {
  switch (kind) {
    case Kind::Flat: return "flat:" + fmt(level);
    case Kind::PowerLaw:
      return "powerlaw:" + fmt(level) + ":" + fmt(f0) + ":" +
             join(slopes, [](double s) { return fmt(s); });
    case Kind::Aligo: return level == 1.0 ? std::string("aligo") : "aligo:" + fmt(level);
    case Kind::File: return "file:" + file.string();
  }
  return "?";
}

NoiseModel parse_noise_model(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  NoiseModel m;
  if (kind == "flat") {
    m.kind = NoiseModel::Kind::Flat;
    m.level = parse_real("noise", rest);
  } else if (kind == "powerlaw") {
    const auto parts = split(rest, ':');
    if (parts.size() != 3) fail(ErrorCode::ConfigError, "noise: powerlaw needs LEVEL:F0:S1[,S2...]");
    m.kind = NoiseModel::Kind::PowerLaw;
    m.level = parse_real("noise", parts[0]);
    m.f0 = parse_real("noise", parts[1]);
    for (const auto& s : split(parts[2], ',')) m.slopes.push_back(parse_real("noise", s));
    if (m.slopes.empty() || !(m.f0 > 0.0))
      fail(ErrorCode::ConfigError, "noise: powerlaw needs F0 > 0 and at least one slope");
  } else if (kind == "aligo") {
    m.kind = NoiseModel::Kind::Aligo;
    m.level = rest.empty() ? 1.0 : parse_real("noise", rest);
  } else if (kind == "file") {
    m.kind = NoiseModel::Kind::File;
    m.file = trim(rest);
    if (m.file.empty()) fail(ErrorCode::ConfigError, "noise: file model needs a path");
  } else {
    fail(ErrorCode::ConfigError, "noise: unknown model '" + text + "'");
  }
  if (m.kind != NoiseModel::Kind::File && !(m.level > 0.0))
    fail(ErrorCode::ConfigError, "noise: level must be positive");
  return m;
}

Psd noise_psd(const NoiseModel& model, std::size_t N, double f_s) {
  require(N >= 4 && f_s > 0.0, ErrorCode::ConfigError, "noise PSD needs N >= 4 and f_s > 0");
  const double df = f_s / static_cast<double>(N);
  if (model.kind == NoiseModel::Kind::File) {
    try {
      return condition_psd(read_psd_csv(model.file), N, f_s);
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, std::string("noise: ") + e.what());
    }
  }
  std::vector<double> s(N / 2 + 1);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = df * static_cast<double>(k);
    switch (model.kind) {
      case NoiseModel::Kind::Flat: s[k] = model.level; break;
      case NoiseModel::Kind::PowerLaw: {
        const double x = std::max(f, 10.0) / model.f0;
        double acc = 0.0;
        for (double slope : model.slopes) acc += std::pow(x, -slope);
        s[k] = model.level * acc;
        break;
      }
      case NoiseModel::Kind::Aligo: s[k] = 1e-49 * model.level * aligo_fit(f); break;
      case NoiseModel::Kind::File: break;
    }
    if (!(s[k] > 0.0) || !std::isfinite(s[k]))
      fail(ErrorCode::ConfigError, "noise: model is not positive and finite at " + fmt(f) + " Hz");
  }
  return Psd(std::move(s), df);
}

void InjectionSpec::validate() const {
  if (!(amplitude >= 0.0)) fail(ErrorCode::ConfigError, "injection amplitude must be >= 0");
  if (!(noise_scale >= 0.0)) fail(ErrorCode::ConfigError, "noise_scale must be >= 0");
  if (!(f_s > 0.0) || !(duration > 0.0))
    fail(ErrorCode::ConfigError, "injection needs positive duration and f_s");
  const double n = duration * f_s;
  if (n != std::round(n) || n > 1e10 || !is_power_of_two(static_cast<std::uint64_t>(n)))
    fail(ErrorCode::ConfigError, "injection duration * f_s must be a power of two");
  try {
    params.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("injection masses: ") + e.what());
  }
}

SyntheticData synthesize_data(const InjectionSpec& spec) {
  spec.validate();
  const auto N = static_cast<std::size_t>(std::llround(spec.duration * spec.f_s));
  Psd truth = noise_psd(spec.noise, N, spec.f_s);
  const double df = truth.delta_f();

  FrequencySeries y;
  y.bins.assign(N, {});
  y.delta_f = df;
  y.origin_N = N;
  y.origin_f_s = spec.f_s;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (spec.noise_scale > 0.0) {
    for (std::size_t k = 0; k <= N / 2; ++k) {
      if (k == 0 || k == N / 2) {
        y.bins[k] = spec.noise_scale * std::sqrt(truth[k] / (2.0 * df)) * normal(rng);
      } else {
        const double a = normal(rng);
        const double b = normal(rng);
        y.bins[k] = spec.noise_scale * std::sqrt(truth[k] / (4.0 * df)) * cplx(a, b);
      }
    }
  }
  if (spec.amplitude > 0.0) {
    const Template h = generate_template(spec.params, N, spec.f_s, truth, spec.f_low);
    for (std::size_t k = h.k_lo; k <= h.k_hi; ++k) {
      const double x = h.frequency(k) * spec.t_c;
      const double turns = x - std::round(x);
      y.bins[k] += spec.amplitude * h.at(k) * std::polar(1.0, -2.0 * pi * turns);
    }
  }
  for (std::size_t k = 1; k < (N + 1) / 2; ++k) y.bins[N - k] = std::conj(y.bins[k]);
  return {inverse_dft(y, 0.0), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (!(rho0 > 0.0)) fail(ErrorCode::ConfigError, "rho0 must be positive");
  if (variants.empty()) fail(ErrorCode::ConfigError, "no variants selected");
  if (depths.empty()) fail(ErrorCode::ConfigError, "no depths selected");
  if (n_repeats == 0) fail(ErrorCode::ConfigError, "repeats must be >= 1");
  if (!(m_min > 0.0 && m_min < m_max)) fail(ErrorCode::ConfigError, "need 0 < m_min < m_max");
  if (q1 < 1 || q2 < 1 || q1 + q2 > 26) fail(ErrorCode::ConfigError, "grid must hold 2..2^26 points");
  for (unsigned r : resolutions)
    if (r < 1 || 2 * r > 26) fail(ErrorCode::ConfigError, "resolution sweep entry out of range");
  if (data_file) {
    std::error_code ec;
    if (!fs::exists(*data_file, ec) && !fs::exists(fs::path(*data_file).concat(".json"), ec))
      fail(ErrorCode::ConfigError, "data file not found: " + data_file->string());
    if (psd_source == PsdSource::Truth)
      fail(ErrorCode::ConfigError, "psd = truth is only available for synthetic data");
  } else {
    injection.validate();
  }
  if (psd_source == PsdSource::File && !fs::exists(psd_file))
    fail(ErrorCode::ConfigError, "PSD file not found: " + psd_file.string());
  if (!(psd_settings.seg_seconds > 0.0) || !(psd_settings.overlap_frac >= 0.0) ||
      !(psd_settings.overlap_frac < 1.0))
    fail(ErrorCode::ConfigError, "PSD segment length must be > 0 and overlap in [0, 1)");
  if (!(f_low > 0.0)) fail(ErrorCode::ConfigError, "f_low must be positive");
}

std::vector<std::string> preset_names() {
  return {"default", "fig8", "fig10", "fig11", "fig12", "gw170817", "gw200115"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.preset = name;
  cfg.depths = parse_depths("1..15");
  if (name == "default" || name == "fig8") return cfg;
  if (name == "fig10") {
    cfg.binary_cost = true;
    return cfg;
  }
  if (name == "fig11") {
    cfg.resolutions = {7, 8, 9};
    return cfg;
  }
  if (name == "fig12") {
    cfg.charts = {Chart::M1M2, Chart::Theta1Eta, Chart::MEta, Chart::Theta1Theta2};
    return cfg;
  }
  if (name == "gw170817") {
    // Livingston, 256 s at 4096 Hz; the strain file comes from the fetch tool.
    cfg.psd_source = PsdSource::Estimate;
    cfg.t_c = 170.7;
    cfg.q1 = cfg.q2 = 8;
    cfg.align_to = MassParams{1.3758, 1.3758};
    cfg.injection.f_s = 4096.0;
    cfg.injection.duration = 256.0;
    return cfg;
  }
  if (name == "gw200115") {
    // Segment duration, detector and t_c must be supplied with the data.
    cfg.psd_source = PsdSource::Estimate;
    cfg.q1 = cfg.q2 = 8;
    cfg.m_max = 10.0;
    cfg.align_to = MassParams{7.58, 1.33};
    return cfg;
  }
  fail(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

std::vector<unsigned> parse_depths(const std::string& text) {
  const std::string t = trim(text);
  std::vector<unsigned> out;
  const auto dots = t.find("..");
  if (dots != std::string::npos) {
    const auto a = parse_uint("depths", t.substr(0, dots));
    const auto b = parse_uint("depths", t.substr(dots + 2));
    if (a > b || b > 10000) fail(ErrorCode::ConfigError, "depths: expected a..b with a <= b");
    for (auto p = a; p <= b; ++p) out.push_back(static_cast<unsigned>(p));
    return out;
  }
  for (const auto& part : split(t, ',')) {
    const auto p = parse_uint("depths", part);
    if (p > 10000) fail(ErrorCode::ConfigError, "depths: value too large");
    out.push_back(static_cast<unsigned>(p));
  }
  if (out.empty()) fail(ErrorCode::ConfigError, "depths: empty list");
  return out;
}

std::pair<unsigned, unsigned> parse_grid_shape(const std::string& text) {
  const std::string t = trim(text);
  const auto x = t.find_first_of("xX");
  if (x == std::string::npos) fail(ErrorCode::ConfigError, "grid: expected AxB, got '" + text + "'");
  const auto a = parse_uint("grid", t.substr(0, x));
  const auto b = parse_uint("grid", t.substr(x + 1));
  if (!is_power_of_two(a) || !is_power_of_two(b) || a < 2 || b < 2)
    fail(ErrorCode::ConfigError, "grid: sides must be powers of two >= 2");
  return {log2_exact(a), log2_exact(b)};
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data", [](ExperimentConfig& c, const std::string& v) {
         if (trim(v).empty() || trim(v) == "synthetic") {
           c.data_file.reset();
         } else {
           c.data_file = trim(v);
           if (c.psd_source == PsdSource::Truth) c.psd_source = PsdSource::Estimate;
         }
       }},
      {"noise", [](ExperimentConfig& c, const std::string& v) { c.injection.noise = parse_noise_model(v); }},
      {"noise_scale", [](ExperimentConfig& c, const std::string& v) { c.injection.noise_scale = parse_real("noise_scale", v); }},
      {"noise_seed", [](ExperimentConfig& c, const std::string& v) { c.injection.seed = parse_uint("noise_seed", v); }},
      {"amplitude", [](ExperimentConfig& c, const std::string& v) { c.injection.amplitude = parse_real("amplitude", v); }},
      {"m1", [](ExperimentConfig& c, const std::string& v) { c.injection.params.m1 = parse_real("m1", v); }},
      {"m2", [](ExperimentConfig& c, const std::string& v) { c.injection.params.m2 = parse_real("m2", v); }},
      {"inject_t_c", [](ExperimentConfig& c, const std::string& v) { c.injection.t_c = parse_real("inject_t_c", v); }},
      {"t_c", [](ExperimentConfig& c, const std::string& v) {
         c.t_c = parse_real("t_c", v);
         c.injection.t_c = *c.t_c;
       }},
      {"duration", [](ExperimentConfig& c, const std::string& v) { c.injection.duration = parse_real("duration", v); }},
      {"f_s", [](ExperimentConfig& c, const std::string& v) { c.injection.f_s = parse_real("f_s", v); }},
      {"psd", [](ExperimentConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "truth") c.psd_source = PsdSource::Truth;
         else if (t == "estimate") c.psd_source = PsdSource::Estimate;
         else {
           c.psd_source = PsdSource::File;
           c.psd_file = t.rfind("file:", 0) == 0 ? t.substr(5) : t;
         }
       }},
      {"psd_seg", [](ExperimentConfig& c, const std::string& v) { c.psd_settings.seg_seconds = parse_real("psd_seg", v); }},
      {"psd_overlap", [](ExperimentConfig& c, const std::string& v) { c.psd_settings.overlap_frac = parse_real("psd_overlap", v); }},
      {"psd_method", [](ExperimentConfig& c, const std::string& v) {
         try {
           c.psd_settings.method = parse_psd_method(trim(v));
         } catch (const Error& e) {
           fail(ErrorCode::ConfigError, e.what());
         }
       }},
      {"chart", [](ExperimentConfig& c, const std::string& v) {
         try {
           c.chart = parse_chart(trim(v));
         } catch (const Error& e) {
           fail(ErrorCode::ConfigError, e.what());
         }
       }},
      {"grid", [](ExperimentConfig& c, const std::string& v) {
         std::tie(c.q1, c.q2) = parse_grid_shape(v);
       }},
      {"m_min", [](ExperimentConfig& c, const std::string& v) { c.m_min = parse_real("m_min", v); }},
      {"m_max", [](ExperimentConfig& c, const std::string& v) { c.m_max = parse_real("m_max", v); }},
      {"align", [](ExperimentConfig& c, const std::string& v) { c.align = parse_bool("align", v); }},
      {"align_m1", [](ExperimentConfig& c, const std::string& v) {
         MassParams p = c.resolved_align();
         p.m1 = parse_real("align_m1", v);
         c.align_to = p;
       }},
      {"align_m2", [](ExperimentConfig& c, const std::string& v) {
         MassParams p = c.resolved_align();
         p.m2 = parse_real("align_m2", v);
         c.align_to = p;
       }},
      {"f_low", [](ExperimentConfig& c, const std::string& v) {
         c.f_low = parse_real("f_low", v);
         c.injection.f_low = c.f_low;
       }},
      {"rho0", [](ExperimentConfig& c, const std::string& v) { c.rho0 = parse_real("rho0", v); }},
      {"variants", [](ExperimentConfig& c, const std::string& v) {
         c.variants.clear();
         for (const auto& name : split(v, ','))
           if (!name.empty()) c.variants.push_back(parse_variant(name));
       }},
      {"depths", [](ExperimentConfig& c, const std::string& v) { c.depths = parse_depths(v); }},
      {"repeats", [](ExperimentConfig& c, const std::string& v) {
         c.n_repeats = static_cast<unsigned>(parse_uint("repeats", v));
       }},
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.base_seed = parse_uint("seed", v); }},
      {"binary_cost", [](ExperimentConfig& c, const std::string& v) { c.binary_cost = parse_bool("binary_cost", v); }},
      {"gtol", [](ExperimentConfig& c, const std::string& v) { c.bfgs.gtol = parse_real("gtol", v); }},
      {"max_iter", [](ExperimentConfig& c, const std::string& v) {
         c.bfgs.max_iter = static_cast<unsigned>(parse_uint("max_iter", v));
       }},
      {"resolutions", [](ExperimentConfig& c, const std::string& v) {
         c.resolutions.clear();
         for (const auto& part : split(v, ','))
           if (!part.empty()) c.resolutions.push_back(static_cast<unsigned>(parse_uint("resolutions", part)));
       }},
      {"charts", [](ExperimentConfig& c, const std::string& v) {
         c.charts.clear();
         for (const auto& part : split(v, ','))
           if (!part.empty()) {
             try {
               c.charts.push_back(parse_chart(part));
             } catch (const Error& e) {
               fail(ErrorCode::ConfigError, e.what());
             }
           }
       }},
      {"out", [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); }},
      {"cache", [](ExperimentConfig& c, const std::string& v) { c.cache_dir = fs::path(trim(v)); }},
      {"workers", [](ExperimentConfig& c, const std::string& v) {
         c.workers = static_cast<unsigned>(parse_uint("workers", v));
       }},
      {"plots", [](ExperimentConfig& c, const std::string& v) { c.plots = parse_bool("plots", v); }},
  };
  return table;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value) {
  std::string key = trim(key_in);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "preset") {
    cfg = preset_config(trim(value));
    return;
  }
  if (key == "a") key = "amplitude";
  if (key == "p") key = "depths";
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) fail(ErrorCode::ConfigError, "unknown setting '" + key_in + "'");
  try {
    it->second(cfg, value);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, key + ": " + e.what());
  }
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys{"preset"};
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

std::string describe_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto psd = [&] {
    switch (c.psd_source) {
      case PsdSource::Truth: return std::string("truth");
      case PsdSource::Estimate: return std::string("estimate");
      case PsdSource::File: return "file:" + c.psd_file.string();
    }
    return std::string();
  }();
  const MassParams al = c.resolved_align();
  os << "preset = " << c.preset << '\n'
     << "data = " << (c.data_file ? c.data_file->string() : "synthetic") << '\n'
     << "noise = " << c.injection.noise.describe() << '\n'
     << "noise_scale = " << fmt(c.injection.noise_scale) << '\n'
     << "noise_seed = " << c.injection.seed << '\n'
     << "amplitude = " << fmt(c.injection.amplitude) << '\n'
     << "m1 = " << fmt(c.injection.params.m1) << '\n'
     << "m2 = " << fmt(c.injection.params.m2) << '\n'
     << "inject_t_c = " << fmt(c.injection.t_c) << '\n'
     << "duration = " << fmt(c.injection.duration) << '\n'
     << "f_s = " << fmt(c.injection.f_s) << '\n'
     << "t_c = " << fmt(c.resolved_t_c()) << '\n'
     << "psd = " << psd << '\n'
     << "psd_seg = " << fmt(c.psd_settings.seg_seconds) << '\n'
     << "psd_overlap = " << fmt(c.psd_settings.overlap_frac) << '\n'
     << "psd_method = " << psd_method_name(c.psd_settings.method) << '\n'
     << "chart = " << chart_name(c.chart) << '\n'
     << "grid = " << (1u << c.q1) << 'x' << (1u << c.q2) << '\n'
     << "m_min = " << fmt(c.m_min) << '\n'
     << "m_max = " << fmt(c.m_max) << '\n'
     << "align = " << (c.align ? "true" : "false") << '\n'
     << "align_m1 = " << fmt(al.m1) << '\n'
     << "align_m2 = " << fmt(al.m2) << '\n'
     << "f_low = " << fmt(c.f_low) << '\n'
     << "rho0 = " << fmt(c.rho0) << '\n'
     << "variants = " << join(c.variants, [](Variant v) { return std::string(variant_name(v)); }) << '\n'
     << "depths = " << join(c.depths, [](unsigned p) { return std::to_string(p); }) << '\n'
     << "repeats = " << c.n_repeats << '\n'
     << "seed = " << c.base_seed << '\n'
     << "binary_cost = " << (c.binary_cost ? "true" : "false") << '\n'
     << "gtol = " << fmt(c.bfgs.gtol) << '\n'
     << "max_iter = " << c.bfgs.max_iter << '\n'
     << "resolutions = " << join(c.resolutions, [](unsigned r) { return std::to_string(r); }) << '\n'
     << "charts = " << join(c.charts, [](Chart ch) { return std::string(chart_name(ch)); }) << '\n'
     << "out = " << c.output_dir.string() << '\n'
     << "cache = " << c.resolved_cache_dir().string() << '\n'
     << "workers = " << c.workers << '\n'
     << "plots = " << (c.plots ? "true" : "false") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Data preparation and the quality-grid cache

PreparedData prepare_data(const ExperimentConfig& cfg) {
  std::optional<TimeSeries> series;
  std::optional<Psd> truth;
  if (cfg.data_file) {
    try {
      series = read_strain(*cfg.data_file).series;
    } catch (const Error& e) {
      fail(ErrorCode::DataError, e.what());
    }
  } else {
    auto synth = synthesize_data(cfg.injection);
    series = std::move(synth.series);
    truth = std::move(synth.truth);
  }
  const std::size_t N = series->size();
  const double f_s = series->f_s();
  std::optional<Psd> psd;
  switch (cfg.psd_source) {
    case PsdSource::Truth:
      if (!truth) fail(ErrorCode::ConfigError, "psd = truth needs synthetic data");
      psd = *truth;
      break;
    case PsdSource::Estimate:
      psd = condition_psd(estimate_psd(*series, cfg.psd_settings), N, f_s, 1e-6, cfg.f_low);
      break;
    case PsdSource::File:
      psd = condition_psd(read_psd_csv(cfg.psd_file), N, f_s, 1e-6, cfg.f_low);
      break;
  }
  FrequencySeries spectrum = forward_dft(*series);
  return {std::move(*series), std::move(*psd), std::move(spectrum), std::move(truth)};
}

Grid experiment_grid(const ExperimentConfig& cfg, const PreparedData& data) {
  const CoordChart chart{cfg.chart, data.series.f_s()};
  std::optional<MassParams> align;
  if (cfg.align) align = cfg.resolved_align();
  return build_grid(cfg.m_min, cfg.m_max, cfg.q1, cfg.q2, chart, align);
}

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      fail(ErrorCode::Internal, "SHA-256 initialisation failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void bytes(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
  void text(const std::string& s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    bytes(s.data(), s.size());
  }
  void real(double v) { bytes(&v, sizeof v); }
  void count(std::uint64_t v) { bytes(&v, sizeof v); }
  void reals(std::span<const double> v) {
    count(v.size());
    bytes(v.data(), v.size_bytes());
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string quality_digest(const PreparedData& data, const Grid& grid, double t_c, double f_low) {
  Sha256 h;
  h.text("gwvqa-quality-v1");
  h.real(data.series.f_s());
  h.real(data.series.t0());
  h.reals(data.series.samples());
  h.real(data.psd.delta_f());
  h.reals(data.psd.values());
  h.text(chart_name(grid.chart.tag));
  h.real(grid.chart.f_s);
  for (int d = 0; d < 2; ++d) {
    h.real(grid.lo[d]);
    h.real(grid.hi[d]);
    h.count(grid.dims[d]);
  }
  h.count(grid.aligned_to ? 1 : 0);
  if (grid.aligned_to) {
    h.real(grid.aligned_to->m1);
    h.real(grid.aligned_to->m2);
    for (int d = 0; d < 2; ++d) {
      h.count(grid.anchor[d]);
      h.real(grid.anchor_coords[d]);
    }
  }
  h.real(t_c);
  h.real(f_low);
  return h.hex();
}

QualityResult cached_quality(const ExperimentConfig& cfg, const PreparedData& data,
                             const Grid& grid) {
  const double t_c = cfg.resolved_t_c();
  QualityResult out;
  out.digest = quality_digest(data, grid, t_c, cfg.f_low);
  const fs::path dir = cfg.resolved_cache_dir();
  const fs::path base = dir / ("quality-" + out.digest.substr(0, 32));
  std::error_code ec;
  if (fs::exists(fs::path(base).concat(".json"), ec) && fs::exists(fs::path(base).concat(".bin"), ec)) {
    try {
      CachedQualityGrid cached = read_quality_grid(base);
      if (cached.digest == out.digest && !cached.grid.binary) {
        cached.grid.grid = grid;
        cached.grid.threshold = cfg.rho0;
        cached.grid.marked = count_above(cached.grid.values, cfg.rho0);
        out.quality = std::make_shared<QualityGrid>(std::move(cached.grid));
        out.from_cache = true;
        return out;
      }
    } catch (const Error&) {
      // Unreadable cache entries are recomputed and overwritten.
    }
  }
  auto q = std::make_shared<QualityGrid>(
      evaluate_quality(grid, data.spectrum, data.psd, t_c, cfg.f_low, cfg.rho0, cfg.workers));
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create cache directory " + dir.string());
  write_quality_grid(base, *q, out.digest);
  out.quality = std::move(q);
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Pass {
  Chart chart;
  unsigned q1, q2;
  std::string suffix;
};

std::vector<Pass> passes(const ExperimentConfig& cfg) {
  std::vector<Chart> charts = cfg.charts.empty() ? std::vector<Chart>{cfg.chart} : cfg.charts;
  std::vector<std::pair<unsigned, unsigned>> shapes;
  if (cfg.resolutions.empty())
    shapes.emplace_back(cfg.q1, cfg.q2);
  else
    for (unsigned r : cfg.resolutions) shapes.emplace_back(r, r);
  const bool single = charts.size() == 1 && shapes.size() == 1;
  std::vector<Pass> out;
  for (Chart c : charts)
    for (auto [a, b] : shapes) {
      std::string suffix;
      if (!single)
        suffix = std::string("_") + chart_name(c) + "_" + std::to_string(1u << a) + "x" +
                 std::to_string(1u << b);
      out.push_back({c, a, b, suffix});
    }
  return out;
}

std::string coord_label(Chart chart, int d) {
  switch (chart) {
    case Chart::M1M2: return d == 0 ? "m1 [Msun]" : "m2 [Msun]";
    case Chart::Theta1Eta: return d == 0 ? "theta1" : "eta";
    case Chart::MEta: return d == 0 ? "M [Msun]" : "eta";
    case Chart::Theta1Theta2: return d == 0 ? "theta1" : "theta2";
  }
  return "?";
}

// Rows follow register 2 so the first coordinate runs along x.
std::vector<double> transpose_for_plot(const std::vector<double>& values, const Grid& g) {
  std::vector<double> out(values.size());
  for (std::size_t j1 = 0; j1 < g.dims[0]; ++j1)
    for (std::size_t j2 = 0; j2 < g.dims[1]; ++j2)
      out[j2 * g.dims[0] + j1] = values[g.index(j1, j2)];
  return out;
}

std::array<double, 4> plot_extent(const Grid& g) {
  const Coords a = g.point(0, 0);
  const Coords b = g.point(g.dims[0] - 1, g.dims[1] - 1);
  const Coords s = g.step();
  return {a[0] - 0.5 * s[0], b[0] + 0.5 * s[0], a[1] - 0.5 * s[1], b[1] + 0.5 * s[1]};
}

void save_grid_heatmap(const fs::path& path, const std::string& title, const Grid& g,
                       const std::vector<double>& values, double vmin, double vmax) {
  svg::save(path, svg::heatmap({title, coord_label(g.chart.tag, 0), coord_label(g.chart.tag, 1)},
                               transpose_for_plot(values, g), g.dims[1], g.dims[0],
                               plot_extent(g), vmin, vmax));
}

std::pair<double, double> value_range(const std::vector<double>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return {*mn, *mx};
}

const char* kResultsHeader =
    "chart,q1,q2,marked,variant,depth,n_repeats,mean_expectation,std_expectation,"
    "mean_success,std_success,mean_iters,mean_wall_s";

std::string results_line(const ExperimentRow& r) {
  const RepeatStats& s = r.stats;
  std::ostringstream os;
  os << chart_name(r.chart) << ',' << r.q1 << ',' << r.q2 << ',' << r.marked << ','
     << variant_name(s.variant) << ',' << s.depth << ',' << s.n_repeats << ','
     << fmt(s.mean_expectation) << ',' << fmt(s.std_expectation) << ',' << fmt(s.mean_success)
     << ',' << fmt(s.std_success) << ',' << fmt(s.mean_iters) << ',' << short_fmt(s.mean_wall_s);
  return os.str();
}

nlohmann::json run_json(const Pass& pass, const RunResult& r) {
  return {{"chart", chart_name(pass.chart)},
          {"q1", pass.q1},
          {"q2", pass.q2},
          {"variant", variant_name(r.variant)},
          {"depth", r.depth},
          {"seed", r.seed},
          {"params_init", r.params_init},
          {"params_star", r.params_star},
          {"expectation", r.expectation},
          {"quality_expectation", r.quality_expectation},
          {"success", r.success_prob},
          {"iterations", r.report.iterations},
          {"objective_evals", r.report.objective_evals},
          {"oracle_calls", r.oracle_calls},
          {"gradient_norm", r.report.gradient_norm},
          {"converged", r.report.converged},
          {"termination", termination_name(r.report.termination)},
          {"failed", r.failed},
          {"error", r.error},
          {"wall_time_s", r.wall_time}};
}

void plot_rows(const fs::path& dir, const std::string& suffix,
               const std::vector<ExperimentRow>& rows) {
  std::vector<svg::Series> success, expect;
  for (const auto& row : rows) {
    const std::string name = variant_name(row.stats.variant);
    auto find = [&](std::vector<svg::Series>& v) -> svg::Series& {
      for (auto& s : v)
        if (s.label == name) return s;
      v.push_back({name, {}, {}, {}});
      return v.back();
    };
    auto& s = find(success);
    s.x.push_back(row.stats.depth);
    s.y.push_back(row.stats.mean_success);
    s.err.push_back(row.stats.std_success);
    auto& e = find(expect);
    e.x.push_back(row.stats.depth);
    e.y.push_back(row.stats.mean_expectation);
    e.err.push_back(row.stats.std_expectation);
  }
  svg::save(dir / ("success" + suffix + ".svg"),
            svg::line_plot({"Success probability", "depth p", "Prob[rho > rho0]"}, success));
  svg::save(dir / ("expectation" + suffix + ".svg"),
            svg::line_plot({"Cost expectation", "depth p", "<cost>"}, expect));
}

void write_final_probabilities(const fs::path& dir, const Pass& pass, const Grid& g,
                               const std::string& variant, unsigned depth,
                               const StateVector& s, bool plots) {
  const std::string stem = "final_prob_" + variant + "_p" + std::to_string(depth) + pass.suffix;
  std::ofstream out(dir / (stem + ".csv"));
  if (!out) fail(ErrorCode::IoError, "cannot write " + (dir / (stem + ".csv")).string());
  out << "j1,j2,x1,x2,prob\n";
  const auto probs = s.probabilities();
  for (std::size_t j1 = 0; j1 < g.dims[0]; ++j1)
    for (std::size_t j2 = 0; j2 < g.dims[1]; ++j2) {
      const Coords c = g.point(j1, j2);
      out << j1 << ',' << j2 << ',' << fmt(c[0]) << ',' << fmt(c[1]) << ','
          << fmt(probs[g.index(j1, j2)]) << '\n';
    }
  if (plots) {
    const auto [mn, mx] = value_range(probs);
    save_grid_heatmap(dir / (stem + ".svg"), variant + " final probabilities, p = " +
                      std::to_string(depth), g, probs, std::min(0.0, mn), mx);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + cfg.output_dir.string());
  {
    std::ofstream conf(cfg.output_dir / "config.ini");
    conf << describe_config(cfg);
  }

  ExperimentConfig base = cfg;
  const PreparedData data = prepare_data(cfg);
  write_psd_csv(cfg.output_dir / "psd.csv", data.psd,
                cfg.psd_source == PsdSource::Estimate ? std::optional(cfg.psd_settings)
                                                      : std::nullopt);

  ExperimentResult result;
  result.results_csv = cfg.output_dir / "results.csv";
  result.runs_jsonl = cfg.output_dir / "runs.jsonl";
  std::ofstream csv(result.results_csv);
  std::ofstream jsonl(result.runs_jsonl);
  if (!csv || !jsonl) fail(ErrorCode::IoError, "cannot write results in " + cfg.output_dir.string());
  csv << kResultsHeader << '\n';
  csv.flush();

  const unsigned max_depth = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  for (const Pass& pass : passes(cfg)) {
    ExperimentConfig pc = base;
    pc.chart = pass.chart;
    pc.q1 = pass.q1;
    pc.q2 = pass.q2;
    const Grid grid = experiment_grid(pc, data);
    const QualityResult qr = cached_quality(pc, data, grid);
    const QualityGrid& q = *qr.quality;
    if (cfg.plots) {
      const auto [mn, mx] = value_range(q.values);
      save_grid_heatmap(cfg.output_dir / ("quality" + pass.suffix + ".svg"),
                        "Quality rho, J_S = " + std::to_string(q.marked), grid, q.values, mn, mx);
    }

    SweepOptions opts;
    opts.binary_cost = cfg.binary_cost;
    opts.rho0 = cfg.rho0;
    opts.n_repeats = cfg.n_repeats;
    opts.base_seed = cfg.base_seed;
    opts.bfgs = cfg.bfgs;
    opts.workers = cfg.workers == 0 ? default_workers() : cfg.workers;

    std::map<std::string, RunResult> best_final;
    std::vector<ExperimentRow> pass_rows;
    const auto sink = [&](const RunResult& r) {
      jsonl << run_json(pass, r).dump() << '\n';
      jsonl.flush();
      if (r.depth != max_depth) return;
      auto& slot = best_final[variant_name(r.variant)];
      if (slot.params_star.empty() || r.success_prob > slot.success_prob) slot = r;
      if (r.variant == Variant::Rdgs) slot = r;
    };
    const auto on_cell = [&](const RepeatStats& st) {
      ExperimentRow row{pass.chart, pass.q1, pass.q2, q.marked, st};
      csv << results_line(row) << '\n';
      csv.flush();
      pass_rows.push_back(row);
      result.rows.push_back(row);
    };
    depth_sweep(cfg.variants, cfg.depths, qr.quality, opts, sink, on_cell);

    for (const auto& [name, run] : best_final) {
      AnsatzConfig ac{run.variant, run.depth, qr.quality, cfg.binary_cost, cfg.rho0};
      StateVector s;
      if (run.variant == Variant::Rdgs) {
        s = uniform_state(ac.dims());
        grover_iterate(s, binarize(q, cfg.rho0), run.depth);
      } else {
        s = evaluate_ansatz(ac, run.params_star);
      }
      write_final_probabilities(cfg.output_dir, pass, grid, name, run.depth, s, cfg.plots);
    }
    if (cfg.plots) plot_rows(cfg.output_dir, pass.suffix, pass_rows);
  }
  return result;
}

DecompositionResult run_decomposition(const ExperimentConfig& cfg, const MassParams& params) {
  cfg.validate();
  params.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + cfg.output_dir.string());
  const PreparedData data = prepare_data(cfg);
  const Grid grid = experiment_grid(cfg, data);
  const double t_c = cfg.resolved_t_c();
  const Template h = generate_template(params, data.series.size(), data.series.f_s(), data.psd,
                                       cfg.f_low);
  const Decomposition dec = decompose(data.spectrum, h, data.psd, t_c);

  DecompositionResult out;
  out.coefficient = dec.coefficient;
  out.data = *cached_quality(cfg, data, grid).quality;
  out.signal = evaluate_quality(grid, dec.signal_part, data.psd, t_c, cfg.f_low, cfg.rho0, cfg.workers);
  out.noise = evaluate_quality(grid, dec.residual, data.psd, t_c, cfg.f_low, cfg.rho0, cfg.workers);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const QualityGrid* q : {&out.data, &out.signal, &out.noise}) {
    const auto [mn, mx] = value_range(q->values);
    lo = std::min(lo, mn);
    hi = std::max(hi, mx);
  }
  out.color_range = {lo, hi};
  const std::pair<const char*, const QualityGrid*> parts[] = {
      {"data", &out.data}, {"signal", &out.signal}, {"noise", &out.noise}};
  for (const auto& [name, q] : parts) {
    const std::string stem = std::string("quality_") + name;
    write_quality_grid(cfg.output_dir / stem, *q, {}, out.color_range);
    if (cfg.plots)
      save_grid_heatmap(cfg.output_dir / (stem + ".svg"), std::string("Quality (") + name + ")",
                        grid, q->values, lo, hi);
  }
  return out;
}

RdgsSummary rdgs_on_experiment(const ExperimentConfig& cfg, unsigned depth) {
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  const Grid grid = experiment_grid(cfg, data);
  const QualityResult qr = cached_quality(cfg, data, grid);
  const RunResult r = rdgs_run({Variant::Rdgs, depth, qr.quality, false, cfg.rho0});
  RdgsSummary s;
  s.J = qr.quality->size();
  s.marked = qr.quality->marked;
  s.depth = depth;
  s.simulated = r.success_prob;
  s.closed_form = grover_closed_form(s.J, s.marked, depth);
  return s;
}

RdgsSummary rdgs_synthetic(unsigned q, std::size_t marked, unsigned depth) {
  require(q >= 1 && q <= 26, ErrorCode::InvalidArgument, "qubit count must be in 1..26");
  const std::size_t J = std::size_t{1} << q;
  require(marked >= 1 && marked <= J, ErrorCode::NoMarkedStates, "need 1 <= marked <= J");
  QualityGrid binary;
  binary.binary = true;
  binary.values.assign(J, 0.0);
  for (std::size_t i = 0; i < marked; ++i) binary.values[i * J / marked] = 1.0;
  StateVector s = uniform_state({std::size_t{1} << (q - q / 2), std::size_t{1} << (q / 2)});
  grover_iterate(s, binary, depth);
  RdgsSummary out;
  out.J = J;
  out.marked = marked;
  out.depth = depth;
  out.simulated = success_probability(s, binary, 0.5);
  out.closed_form = grover_closed_form(J, marked, depth);
  return out;
}

std::string render_report(const fs::path& dir) {
  std::ifstream in(dir / "results.csv");
  if (!in) fail(ErrorCode::DataError, "no results.csv in " + dir.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    fail(ErrorCode::DataError, "results.csv has an unexpected header");

  struct Key {
    std::string chart;
    unsigned q1, q2;
    bool operator<(const Key& o) const {
      return std::tie(chart, q1, q2) < std::tie(o.chart, o.q1, o.q2);
    }
  };
  std::map<Key, std::vector<ExperimentRow>> groups;
  std::vector<Key> order;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 13)
      fail(ErrorCode::DataError, "results.csv line " + std::to_string(line_no) + " is malformed");
    ExperimentRow row;
    try {
      row.chart = parse_chart(f[0]);
      row.q1 = static_cast<unsigned>(parse_uint("q1", f[1]));
      row.q2 = static_cast<unsigned>(parse_uint("q2", f[2]));
      row.marked = parse_uint("marked", f[3]);
      row.stats.variant = parse_variant(f[4]);
      row.stats.depth = static_cast<unsigned>(parse_uint("depth", f[5]));
      row.stats.n_repeats = parse_uint("n_repeats", f[6]);
      row.stats.mean_expectation = parse_real("mean_expectation", f[7]);
      row.stats.std_expectation = parse_real("std_expectation", f[8]);
      row.stats.mean_success = parse_real("mean_success", f[9]);
      row.stats.std_success = parse_real("std_success", f[10]);
      row.stats.mean_iters = parse_real("mean_iters", f[11]);
      row.stats.mean_wall_s = parse_real("mean_wall_s", f[12]);
    } catch (const Error& e) {
      fail(ErrorCode::DataError, "results.csv line " + std::to_string(line_no) + ": " + e.what());
    }
    const Key key{f[0], row.q1, row.q2};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(row);
  }

  std::ostringstream os;
  const bool single = order.size() == 1;
  for (const Key& key : order) {
    const auto& rows = groups[key];
    const std::string suffix =
        single ? std::string()
               : "_" + key.chart + "_" + std::to_string(1u << key.q1) + "x" + std::to_string(1u << key.q2);
    plot_rows(dir, suffix, rows);
    os << "chart " << key.chart << ", grid " << (1u << key.q1) << 'x' << (1u << key.q2)
       << ", J_S = " << rows.front().marked << '\n';
    std::map<std::string, const ExperimentRow*> deepest;
    for (const auto& r : rows) {
      auto& slot = deepest[variant_name(r.stats.variant)];
      if (!slot || r.stats.depth > slot->stats.depth) slot = &r;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-16s %5s %12s %10s %12s\n", "variant", "depth",
                  "mean_success", "std", "mean_cost");
    os << buf;
    for (const auto& [name, r] : deepest) {
      std::snprintf(buf, sizeof buf, "  %-16s %5u %12.6f %10.6f %12.6f\n", name.c_str(),
                    r->stats.depth, r->stats.mean_success, r->stats.std_success,
                    r->stats.mean_expectation);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace gwvqa
