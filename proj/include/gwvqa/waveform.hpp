#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "gwvqa/psd.hpp"
#include "gwvqa/signal.hpp"

namespace gwvqa {

namespace constants {
inline constexpr double G = 6.67430e-11;
inline constexpr double c = 299792458.0;
// G * M_sun / c^3 in seconds (nominal solar mass parameter 1.32712440018e20 m^3/s^2).
inline constexpr double solar_mass_time = 4.925490947641267e-6;
inline constexpr double euler_gamma = 0.57721566490153286061;
// Schwarzschild innermost stable circular orbit velocity, 1/sqrt(6).
inline constexpr double v_lso = 0.40824829046386301637;
}  // namespace constants

/// Component masses in solar masses.
struct MassParams {
  double m1 = 0.0;
  double m2 = 0.0;

  double total() const { return m1 + m2; }
  double eta() const {
    const double m = total();
    return m1 * m2 / (m * m);
  }
  double chirp_mass() const;
  void validate() const;
};

// TaylorF2 3.5PN phase Psi(f; m1, m2) in radians.
double pn_phase(double f, const MassParams& params);

// Last-stable-orbit GW frequency c^3 v_lso^3 / (pi G M), in Hz.
double f_lso(double total_mass);

struct Band {
  std::size_t k_lo = 0;
  std::size_t k_hi = 0;
};

// k_lo = max(1, ceil(N f_low / f_s)), k_hi = min(floor((N-1)/2), floor(N f_high / f_s)).
Band band_limits(std::size_t N, double f_s, double f_low, double f_high);

/// Frequency-domain template over bins [k_lo, k_hi]; bins[i] belongs to k_lo + i.
struct Template {
  std::vector<cplx> bins;
  std::size_t k_lo = 0;
  std::size_t k_hi = 0;
  double delta_f = 0.0;
  std::size_t origin_N = 0;
  MassParams params;
  bool normalized = false;
  double norm = 1.0;

  cplx at(std::size_t k) const { return bins[k - k_lo]; }
  double frequency(std::size_t k) const { return delta_f * static_cast<double>(k); }
};

// bins[k] = Norm * f_k^{-7/6} exp(i[pi/4 - Psi(f_k)]) with Norm fixing (h|h) = 1.
Template generate_template(const MassParams& params, std::size_t N, double f_s,
                           const Psd& psd, double f_low = 20.0);

// Hermitian embedding into a full N-bin spectrum (zero outside the band).
FrequencySeries embed(const Template& t);

TimeSeries template_time_domain(const Template& t);

void write_template_csv(const std::filesystem::path& path, const Template& t);

}  // namespace gwvqa
