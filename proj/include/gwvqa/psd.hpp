#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gwvqa/signal.hpp"

namespace gwvqa {

/// One-sided noise PSD S_k (strain^2/Hz) on bins k * delta_f, k = 0..size()-1.
/// Every value is positive and finite.
class Psd {
 public:
  Psd(std::vector<double> s_k, double delta_f);

  std::span<const double> values() const { return s_k_; }
  double operator[](std::size_t k) const { return s_k_[k]; }
  std::size_t size() const { return s_k_.size(); }
  double delta_f() const { return delta_f_; }
  double nyquist() const { return delta_f_ * static_cast<double>(s_k_.size() - 1); }

 private:
  std::vector<double> s_k_;
  double delta_f_;
};

enum class PsdMethod { Median, Mean };

struct PsdSettings {
  double seg_seconds = 16.0;
  double overlap_frac = 0.5;
  PsdMethod method = PsdMethod::Median;
};

PsdMethod parse_psd_method(const std::string& name);
const char* psd_method_name(PsdMethod method);

// Welch average of Hann-windowed periodograms |X_k|^2 * 2 / (f_s * sum w^2).
// The median estimate is divided by the finite-sample median bias of a
// chi-square(2) variable.
Psd estimate_psd(const TimeSeriesView& ts, const PsdSettings& settings = {});

// Bias of the sample median of n exponential variates relative to their mean.
double median_bias(std::size_t n);

// Resample onto delta_f = target_f_s / target_N (one-sided, target_N/2+1 bins)
// by linear interpolation of log S. Bins below f_low are clamped to at least
// floor_frac * max(S).
Psd condition_psd(const Psd& psd, std::size_t target_N, double target_f_s,
                  double floor_frac = 1e-6, double f_low = 20.0);

void write_psd_csv(const std::filesystem::path& path, const Psd& psd,
                   const std::optional<PsdSettings>& settings = std::nullopt);
Psd read_psd_csv(const std::filesystem::path& path);

}  // namespace gwvqa
