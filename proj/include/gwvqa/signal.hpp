#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gwvqa {

using cplx = std::complex<double>;

/// Non-owning window onto strain samples.
struct TimeSeriesView {
  std::span<const double> samples;
  double f_s = 0.0;
  double t0 = 0.0;

  std::size_t size() const { return samples.size(); }
  double delta_t() const { return 1.0 / f_s; }
};

/// Real strain samples at a fixed rate. Construction validates f_s > 0,
/// N >= 2 and that every sample is finite.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double f_s, double t0 = 0.0);

  std::span<const double> samples() const { return samples_; }
  double f_s() const { return f_s_; }
  double t0() const { return t0_; }
  double delta_t() const { return 1.0 / f_s_; }
  double duration() const { return static_cast<double>(samples_.size()) / f_s_; }
  std::size_t size() const { return samples_.size(); }

  TimeSeriesView view() const { return {samples_, f_s_, t0_}; }
  operator TimeSeriesView() const { return view(); }

 private:
  std::vector<double> samples_;
  double f_s_;
  double t0_;
};

/// Full N-bin spectrum under the Delta-t weighted DFT convention.
struct FrequencySeries {
  std::vector<cplx> bins;
  double delta_f = 0.0;
  std::size_t origin_N = 0;
  double origin_f_s = 0.0;

  std::size_t size() const { return bins.size(); }
  double frequency(std::size_t k) const { return delta_f * static_cast<double>(k); }
};

// y~_k = dt * sum_n y_n exp(-2 pi i n k / N).
FrequencySeries forward_dft(const TimeSeriesView& ts);

// y_n = df * sum_k y~_k exp(+2 pi i n k / N); exact inverse of forward_dft.
std::vector<cplx> inverse_dft_complex(const FrequencySeries& fs);

// Real part of inverse_dft_complex. Only meaningful for conjugate-symmetric input.
TimeSeries inverse_dft(const FrequencySeries& fs, double t0 = 0.0);

std::vector<double> hann_window(std::size_t n);

// Windows of seg_len samples advancing by seg_len - overlap.
std::vector<TimeSeriesView> segments(const TimeSeriesView& ts, std::size_t seg_len,
                                     std::size_t overlap);

// Strain files: `{base}.json` header + `{base}.bin` little-endian doubles, or a
// single-column CSV with `# f_s=...` comment header.
struct StrainFile {
  TimeSeries series;
  std::string detector;
};

void write_strain(const std::filesystem::path& base, const TimeSeries& ts,
                  const std::string& detector);
void write_strain_csv(const std::filesystem::path& path, const TimeSeries& ts,
                      const std::string& detector);
// Accepts `x.json`, `x.bin`, a bare base name, or `x.csv`.
StrainFile read_strain(const std::filesystem::path& path);

namespace io {
void write_f8le(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f8le(const std::filesystem::path& path, std::size_t expected);
}  // namespace io

}  // namespace gwvqa
