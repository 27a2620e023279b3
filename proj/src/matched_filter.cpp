#include "gwvqa/matched_filter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "gwvqa/error.hpp"
#include "gwvqa/fft.hpp"

namespace gwvqa {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_shared_grid(double df_a, double df_b) {
  if (std::abs(df_a - df_b) > 1e-9 * df_a)
    fail(ErrorCode::BandError, "series and PSD resolutions differ");
}

void check_template_inputs(const Template& t, const FrequencySeries& y, const Psd& psd) {
  check_shared_grid(t.delta_f, y.delta_f);
  check_shared_grid(t.delta_f, psd.delta_f());
  if (t.k_lo < 1 || t.k_lo > t.k_hi || t.k_hi >= y.size() || t.k_hi >= psd.size() ||
      t.bins.size() != t.k_hi - t.k_lo + 1)
    fail(ErrorCode::BandError, "template band exceeds data or PSD bounds");
}

// exp(2 pi i x) with x reduced modulo 1 before scaling.
cplx unit_phase(double x) { return std::polar(1.0, two_pi * (x - std::round(x))); }

}  // namespace

std::size_t SnrSeries::argmax() const {
  return static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
}

double inner_product(const FrequencySeries& x, const FrequencySeries& y, const Psd& psd,
                     std::size_t k_lo, std::size_t k_hi) {
  check_shared_grid(x.delta_f, y.delta_f);
  check_shared_grid(x.delta_f, psd.delta_f());
  if (k_lo > k_hi || k_hi >= x.size() || k_hi >= y.size() || k_hi >= psd.size())
    fail(ErrorCode::BandError, "band exceeds array bounds");
  double acc = 0.0;
  for (std::size_t k = k_lo; k <= k_hi; ++k)
    acc += (std::conj(x.bins[k]) * y.bins[k]).real() / psd[k];
  return 4.0 * x.delta_f * acc;
}

cplx complex_overlap(const Template& t, const FrequencySeries& y, const Psd& psd,
                     double t_c) {
  check_template_inputs(t, y, psd);
  cplx acc{};
  for (std::size_t k = t.k_lo; k <= t.k_hi; ++k) {
    const cplx w = std::conj(t.at(k)) * y.bins[k] / psd[k];
    acc += t_c == 0.0 ? w : unit_phase(t.frequency(k) * t_c) * w;
  }
  return 4.0 * t.delta_f * acc;
}

double snr_at(const Template& t, const FrequencySeries& y, const Psd& psd, double t_c) {
  return std::abs(complex_overlap(t, y, psd, t_c));
}

SnrSeries snr_series(const Template& t, const FrequencySeries& y, const Psd& psd) {
  check_template_inputs(t, y, psd);
  const std::size_t n = y.size();
  std::vector<cplx> z(n, cplx{});
  for (std::size_t k = t.k_lo; k <= t.k_hi; ++k)
    z[k] = 4.0 * t.delta_f * std::conj(t.at(k)) * y.bins[k] / psd[k];
  fft::transform(z, fft::Direction::Backward);
  SnrSeries out;
  out.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.rho[i] = std::abs(z[i]);
  out.delta_t = 1.0 / (y.delta_f * static_cast<double>(n));
  return out;
}

Decomposition decompose(const FrequencySeries& y, const Template& t, const Psd& psd,
                        double t_c) {
  if (!t.normalized) fail(ErrorCode::NormalizationError, "template is not normalized");
  const cplx coeff = complex_overlap(t, y, psd, t_c);
  Decomposition d;
  d.coefficient = coeff;
  d.signal_part.bins.assign(y.size(), cplx{});
  d.signal_part.delta_f = y.delta_f;
  d.signal_part.origin_N = y.origin_N;
  d.signal_part.origin_f_s = y.origin_f_s;
  const std::size_t n = y.size();
  for (std::size_t k = t.k_lo; k <= t.k_hi; ++k) {
    const cplx shift = t_c == 0.0 ? cplx{1.0, 0.0} : std::conj(unit_phase(t.frequency(k) * t_c));
    const cplx s = coeff * t.at(k) * shift;
    d.signal_part.bins[k] = s;
    if (n - k != k) d.signal_part.bins[n - k] = std::conj(s);
  }
  d.residual = y;
  for (std::size_t k = 0; k < n; ++k) d.residual.bins[k] -= d.signal_part.bins[k];
  return d;
}

void write_snr_csv(const std::filesystem::path& path, const SnrSeries& series) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  out << "t_s,rho\n";
  for (std::size_t i = 0; i < series.rho.size(); ++i)
    out << series.t0 + series.delta_t * static_cast<double>(i) << ',' << series.rho[i] << '\n';
}

}  // namespace gwvqa
