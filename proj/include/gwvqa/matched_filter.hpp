#pragma once

#include <filesystem>
#include <vector>

#include "gwvqa/psd.hpp"
#include "gwvqa/signal.hpp"
#include "gwvqa/waveform.hpp"

namespace gwvqa {

/// rho(t_c) sampled at t_c = n * delta_t.
struct SnrSeries {
  std::vector<double> rho;
  double t0 = 0.0;
  double delta_t = 0.0;

  std::size_t argmax() const;
};

// One-sided noise-weighted inner product 4 df Re sum_{k_lo..k_hi} x*_k y_k / S_k.
double inner_product(const FrequencySeries& x, const FrequencySeries& y, const Psd& psd,
                     std::size_t k_lo, std::size_t k_hi);

// Complex overlap 4 df sum e^{2 pi i f_k t_c} h*_k y_k / S_k over the template band.
cplx complex_overlap(const Template& t, const FrequencySeries& y, const Psd& psd,
                     double t_c);

// Phase-maximized SNR |complex_overlap|.
double snr_at(const Template& t, const FrequencySeries& y, const Psd& psd, double t_c);

// snr_at for every t_c = n dt via one inverse transform.
SnrSeries snr_series(const Template& t, const FrequencySeries& y, const Psd& psd);

struct Decomposition {
  FrequencySeries signal_part;
  FrequencySeries residual;
  cplx coefficient;  // projection of y onto the template at t_c
};

// Splits y into its projection onto the (t_c-shifted, phase-maximized) template
// and the orthogonal remainder.
Decomposition decompose(const FrequencySeries& y, const Template& t, const Psd& psd,
                        double t_c = 0.0);

void write_snr_csv(const std::filesystem::path& path, const SnrSeries& series);

}  // namespace gwvqa
