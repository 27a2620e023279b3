#include "gwvqa.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "gwvqa/error.hpp"
#include "gwvqa/harness.hpp"
#include "gwvqa/matched_filter.hpp"
#include "gwvqa/statevector.hpp"
#include "gwvqa/waveform.hpp"

struct gwvqa_config {
  gwvqa::ExperimentConfig cfg;
};
struct gwvqa_timeseries {
  gwvqa::TimeSeries ts;
};
struct gwvqa_psd {
  gwvqa::Psd psd;
};
struct gwvqa_template {
  gwvqa::Template t;
};
struct gwvqa_quality {
  gwvqa::QualityGrid q;
};
struct gwvqa_state {
  gwvqa::StateVector s;
};
struct gwvqa_results {
  std::vector<gwvqa::ExperimentRow> rows;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
gwvqa_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return GWVQA_OK;
  } catch (const gwvqa::Error& e) {
    last_error = e.what();
    return static_cast<gwvqa_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return GWVQA_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) gwvqa::fail(gwvqa::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

gwvqa::MixerFamily parse_family(const std::string& name) {
  using gwvqa::MixerFamily;
  for (MixerFamily f : {MixerFamily::HypercubeGlobal, MixerFamily::CompleteGlobal,
                        MixerFamily::CompletePerDim, MixerFamily::CyclePerDim})
    if (name == gwvqa::mixer_name(f)) return f;
  gwvqa::fail(gwvqa::ErrorCode::InvalidArgument, "unknown mixer family '" + name + "'");
}

void copy_text(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
}

}  // namespace

extern "C" {

const char* gwvqa_version(void) { return "0.1.0"; }

const char* gwvqa_status_name(gwvqa_status status) {
  if (status < GWVQA_OK || status > GWVQA_INTERNAL) return "Unknown";
  return gwvqa::error_code_name(static_cast<gwvqa::ErrorCode>(status));
}

const char* gwvqa_last_error(void) { return last_error.c_str(); }

// ---- configuration

gwvqa_status gwvqa_config_new(const char* preset, gwvqa_config** out) {
  return guard([&] {
    need(out, "out");
    auto cfg = std::make_unique<gwvqa_config>();
    cfg->cfg = gwvqa::preset_config(preset ? preset : "default");
    *out = cfg.release();
  });
}

void gwvqa_config_free(gwvqa_config* cfg) { delete cfg; }

gwvqa_status gwvqa_config_set(gwvqa_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    gwvqa::apply_setting(cfg->cfg, key, value);
  });
}

gwvqa_status gwvqa_config_describe(const gwvqa_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(cfg, "cfg");
    copy_text(gwvqa::describe_config(cfg->cfg), buf, cap, needed);
  });
}

gwvqa_status gwvqa_config_get(const gwvqa_config* cfg, const char* key, char* buf, size_t cap,
                              size_t* needed) {
  return guard([&] {
    need(cfg, "cfg");
    need(key, "key");
    std::string k = key;
    std::replace(k.begin(), k.end(), '-', '_');
    std::istringstream in(gwvqa::describe_config(cfg->cfg));
    std::string line;
    const std::string prefix = k + " = ";
    while (std::getline(in, line))
      if (line.rfind(prefix, 0) == 0) return copy_text(line.substr(prefix.size()), buf, cap, needed);
    gwvqa::fail(gwvqa::ErrorCode::ConfigError, "unknown setting '" + k + "'");
  });
}

gwvqa_status gwvqa_config_load_data(const gwvqa_config* cfg, gwvqa_timeseries** series,
                                    gwvqa_psd** psd) {
  return guard([&] {
    need(cfg, "cfg");
    need(series, "series");
    need(psd, "psd");
    cfg->cfg.validate();
    auto data = gwvqa::prepare_data(cfg->cfg);
    auto ts = std::make_unique<gwvqa_timeseries>(gwvqa_timeseries{std::move(data.series)});
    auto p = std::make_unique<gwvqa_psd>(gwvqa_psd{std::move(data.psd)});
    *series = ts.release();
    *psd = p.release();
  });
}

// ---- time series

gwvqa_status gwvqa_timeseries_new(const double* samples, size_t n, double f_s, double t0,
                                  gwvqa_timeseries** out) {
  return guard([&] {
    need(samples, "samples");
    need(out, "out");
    *out = new gwvqa_timeseries{gwvqa::TimeSeries(std::vector<double>(samples, samples + n), f_s, t0)};
  });
}

gwvqa_status gwvqa_timeseries_read(const char* path, gwvqa_timeseries** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new gwvqa_timeseries{gwvqa::read_strain(path).series};
  });
}

gwvqa_status gwvqa_timeseries_write(const gwvqa_timeseries* ts, const char* base,
                                    const char* detector) {
  return guard([&] {
    need(ts, "ts");
    need(base, "base");
    const std::filesystem::path p(base);
    const std::string det = detector ? detector : "";
    if (p.extension() == ".csv")
      gwvqa::write_strain_csv(p, ts->ts, det);
    else
      gwvqa::write_strain(p, ts->ts, det);
  });
}

size_t gwvqa_timeseries_size(const gwvqa_timeseries* ts) { return ts ? ts->ts.size() : 0; }
double gwvqa_timeseries_sample_rate(const gwvqa_timeseries* ts) { return ts ? ts->ts.f_s() : 0.0; }
const double* gwvqa_timeseries_data(const gwvqa_timeseries* ts) {
  return ts ? ts->ts.samples().data() : nullptr;
}
void gwvqa_timeseries_free(gwvqa_timeseries* ts) { delete ts; }

// ---- PSD

gwvqa_status gwvqa_psd_estimate(const gwvqa_timeseries* ts, double seg_seconds, double overlap_frac,
                                const char* method, gwvqa_psd** out) {
  return guard([&] {
    need(ts, "ts");
    need(out, "out");
    gwvqa::PsdSettings settings;
    settings.seg_seconds = seg_seconds;
    settings.overlap_frac = overlap_frac;
    if (method) settings.method = gwvqa::parse_psd_method(method);
    *out = new gwvqa_psd{gwvqa::estimate_psd(ts->ts, settings)};
  });
}

gwvqa_status gwvqa_psd_condition(const gwvqa_psd* psd, size_t n, double f_s, double f_low,
                                 gwvqa_psd** out) {
  return guard([&] {
    need(psd, "psd");
    need(out, "out");
    *out = new gwvqa_psd{gwvqa::condition_psd(psd->psd, n, f_s, 1e-6, f_low)};
  });
}

gwvqa_status gwvqa_psd_read(const char* path, gwvqa_psd** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new gwvqa_psd{gwvqa::read_psd_csv(path)};
  });
}

gwvqa_status gwvqa_psd_write(const gwvqa_psd* psd, const char* path) {
  return guard([&] {
    need(psd, "psd");
    need(path, "path");
    gwvqa::write_psd_csv(path, psd->psd);
  });
}

size_t gwvqa_psd_size(const gwvqa_psd* psd) { return psd ? psd->psd.size() : 0; }
double gwvqa_psd_delta_f(const gwvqa_psd* psd) { return psd ? psd->psd.delta_f() : 0.0; }
const double* gwvqa_psd_values(const gwvqa_psd* psd) {
  return psd ? psd->psd.values().data() : nullptr;
}
void gwvqa_psd_free(gwvqa_psd* psd) { delete psd; }

// ---- templates and matched filtering

gwvqa_status gwvqa_template_new(double m1, double m2, size_t n, double f_s, const gwvqa_psd* psd,
                                double f_low, gwvqa_template** out) {
  return guard([&] {
    need(psd, "psd");
    need(out, "out");
    *out = new gwvqa_template{gwvqa::generate_template({m1, m2}, n, f_s, psd->psd, f_low)};
  });
}

gwvqa_status gwvqa_template_band(const gwvqa_template* t, size_t* k_lo, size_t* k_hi) {
  return guard([&] {
    need(t, "template");
    if (k_lo) *k_lo = t->t.k_lo;
    if (k_hi) *k_hi = t->t.k_hi;
  });
}

gwvqa_status gwvqa_template_write_csv(const gwvqa_template* t, const char* path) {
  return guard([&] {
    need(t, "template");
    need(path, "path");
    gwvqa::write_template_csv(path, t->t);
  });
}

void gwvqa_template_free(gwvqa_template* t) { delete t; }

gwvqa_status gwvqa_snr_at(const gwvqa_template* t, const gwvqa_timeseries* data,
                          const gwvqa_psd* psd, double t_c, double* rho) {
  return guard([&] {
    need(t, "template");
    need(data, "data");
    need(psd, "psd");
    need(rho, "rho");
    *rho = gwvqa::snr_at(t->t, gwvqa::forward_dft(data->ts), psd->psd, t_c);
  });
}

gwvqa_status gwvqa_snr_series(const gwvqa_template* t, const gwvqa_timeseries* data,
                              const gwvqa_psd* psd, double* out, size_t cap) {
  return guard([&] {
    need(t, "template");
    need(data, "data");
    need(psd, "psd");
    need(out, "out");
    if (cap < data->ts.size())
      gwvqa::fail(gwvqa::ErrorCode::InvalidArgument, "output buffer holds fewer than N values");
    const auto series = gwvqa::snr_series(t->t, gwvqa::forward_dft(data->ts), psd->psd);
    std::copy(series.rho.begin(), series.rho.end(), out);
  });
}

// ---- quality grids

gwvqa_status gwvqa_quality_from_config(const gwvqa_config* cfg, gwvqa_quality** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    cfg->cfg.validate();
    const auto data = gwvqa::prepare_data(cfg->cfg);
    const auto grid = gwvqa::experiment_grid(cfg->cfg, data);
    *out = new gwvqa_quality{*gwvqa::cached_quality(cfg->cfg, data, grid).quality};
  });
}

gwvqa_status gwvqa_quality_read(const char* base, gwvqa_quality** out) {
  return guard([&] {
    need(base, "base");
    need(out, "out");
    *out = new gwvqa_quality{gwvqa::read_quality_grid(base).grid};
  });
}

gwvqa_status gwvqa_quality_write(const gwvqa_quality* q, const char* base) {
  return guard([&] {
    need(q, "quality");
    need(base, "base");
    gwvqa::write_quality_grid(base, q->q, {});
  });
}

gwvqa_status gwvqa_quality_dims(const gwvqa_quality* q, size_t* j1, size_t* j2) {
  return guard([&] {
    need(q, "quality");
    if (j1) *j1 = q->q.grid.dims[0];
    if (j2) *j2 = q->q.grid.dims[1];
  });
}

const double* gwvqa_quality_values(const gwvqa_quality* q) {
  return q ? q->q.values.data() : nullptr;
}

size_t gwvqa_quality_count_above(const gwvqa_quality* q, double rho0) {
  return q ? gwvqa::count_above(q->q.values, rho0) : 0;
}

gwvqa_status gwvqa_quality_point(const gwvqa_quality* q, size_t j, double* x1, double* x2) {
  return guard([&] {
    need(q, "quality");
    if (j >= q->q.grid.size()) gwvqa::fail(gwvqa::ErrorCode::InvalidArgument, "grid index out of range");
    const auto c = q->q.grid.point(j);
    if (x1) *x1 = c[0];
    if (x2) *x2 = c[1];
  });
}

void gwvqa_quality_free(gwvqa_quality* q) { delete q; }

// ---- statevector

gwvqa_status gwvqa_state_uniform(size_t j1, size_t j2, gwvqa_state** out) {
  return guard([&] {
    need(out, "out");
    *out = new gwvqa_state{gwvqa::uniform_state({j1, j2})};
  });
}

gwvqa_status gwvqa_state_phase(gwvqa_state* s, double gamma, const double* f, size_t n) {
  return guard([&] {
    need(s, "state");
    need(f, "f");
    gwvqa::apply_phase(s->s, gamma, {f, n});
  });
}

gwvqa_status gwvqa_state_mixer(gwvqa_state* s, const char* family, const double* times,
                               size_t n_times) {
  return guard([&] {
    need(s, "state");
    need(family, "family");
    need(times, "times");
    gwvqa::apply_mixer(s->s, parse_family(family), {times, n_times});
  });
}

gwvqa_status gwvqa_state_expectation(const gwvqa_state* s, const double* f, size_t n, double* out) {
  return guard([&] {
    need(s, "state");
    need(f, "f");
    need(out, "out");
    *out = gwvqa::expectation(s->s, {f, n});
  });
}

gwvqa_status gwvqa_state_probabilities(const gwvqa_state* s, double* out, size_t n) {
  return guard([&] {
    need(s, "state");
    need(out, "out");
    if (n < s->s.size()) gwvqa::fail(gwvqa::ErrorCode::InvalidArgument, "output buffer too small");
    const auto p = s->s.probabilities();
    std::copy(p.begin(), p.end(), out);
  });
}

size_t gwvqa_state_size(const gwvqa_state* s) { return s ? s->s.size() : 0; }
void gwvqa_state_free(gwvqa_state* s) { delete s; }

double gwvqa_grover_closed_form(size_t J, size_t marked, unsigned p) {
  return gwvqa::grover_closed_form(J, marked, p);
}

gwvqa_status gwvqa_rdgs_synthetic(unsigned q, size_t marked, unsigned p, double* simulated,
                                  double* closed_form) {
  return guard([&] {
    const auto r = gwvqa::rdgs_synthetic(q, marked, p);
    if (simulated) *simulated = r.simulated;
    if (closed_form) *closed_form = r.closed_form;
  });
}

gwvqa_status gwvqa_rdgs_experiment(const gwvqa_config* cfg, unsigned p, double* simulated,
                                   double* closed_form, size_t* J, size_t* marked) {
  return guard([&] {
    need(cfg, "cfg");
    const auto r = gwvqa::rdgs_on_experiment(cfg->cfg, p);
    if (simulated) *simulated = r.simulated;
    if (closed_form) *closed_form = r.closed_form;
    if (J) *J = r.J;
    if (marked) *marked = r.marked;
  });
}

// ---- experiments

gwvqa_status gwvqa_run_experiment(const gwvqa_config* cfg, gwvqa_results** out) {
  return guard([&] {
    need(cfg, "cfg");
    auto res = gwvqa::run_experiment(cfg->cfg);
    if (out) *out = new gwvqa_results{std::move(res.rows)};
  });
}

size_t gwvqa_results_count(const gwvqa_results* r) { return r ? r->rows.size() : 0; }

gwvqa_status gwvqa_results_row(const gwvqa_results* r, size_t i, gwvqa_row* row) {
  return guard([&] {
    need(r, "results");
    need(row, "row");
    if (i >= r->rows.size()) gwvqa::fail(gwvqa::ErrorCode::InvalidArgument, "row index out of range");
    const auto& src = r->rows[i];
    row->chart = gwvqa::chart_name(src.chart);
    row->variant = gwvqa::variant_name(src.stats.variant);
    row->q1 = src.q1;
    row->q2 = src.q2;
    row->depth = src.stats.depth;
    row->marked = src.marked;
    row->n_repeats = src.stats.n_repeats;
    row->mean_expectation = src.stats.mean_expectation;
    row->std_expectation = src.stats.std_expectation;
    row->mean_success = src.stats.mean_success;
    row->std_success = src.stats.std_success;
    row->mean_iters = src.stats.mean_iters;
    row->mean_wall_s = src.stats.mean_wall_s;
  });
}

void gwvqa_results_free(gwvqa_results* r) { delete r; }

gwvqa_status gwvqa_run_decomposition(const gwvqa_config* cfg, double m1, double m2,
                                     double* coefficient_re, double* coefficient_im) {
  return guard([&] {
    need(cfg, "cfg");
    const auto d = gwvqa::run_decomposition(cfg->cfg, {m1, m2});
    if (coefficient_re) *coefficient_re = d.coefficient.real();
    if (coefficient_im) *coefficient_im = d.coefficient.imag();
  });
}

gwvqa_status gwvqa_inject(const gwvqa_config* cfg, const char* base) {
  return guard([&] {
    need(cfg, "cfg");
    need(base, "base");
    const auto data = gwvqa::synthesize_data(cfg->cfg.injection);
    std::filesystem::path p(base);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    if (p.extension() == ".csv")
      gwvqa::write_strain_csv(p, data.series, "SIM");
    else
      gwvqa::write_strain(p, data.series, "SIM");
    auto psd_path = p;
    psd_path.replace_extension();
    psd_path += "-psd.csv";
    gwvqa::write_psd_csv(psd_path, data.truth);
  });
}

gwvqa_status gwvqa_report(const char* dir, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(dir, "dir");
    copy_text(gwvqa::render_report(dir), buf, cap, needed);
  });
}

}  // extern "C"
