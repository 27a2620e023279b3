#include "gwvqa/waveform.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "gwvqa/error.hpp"

namespace gwvqa {

using std::numbers::pi;

double MassParams::chirp_mass() const { return total() * std::pow(eta(), 0.6); }

void MassParams::validate() const {
  require(std::isfinite(m1) && std::isfinite(m2) && m1 > 0.0 && m2 > 0.0,
          ErrorCode::DomainError, "component masses must be positive");
}

namespace {

// Bracketed 3.5PN series with the mass-dependent parts folded in once.
struct PnCoefficients {
  double velocity_scale;  // v = (velocity_scale * f)^{1/3}
  double prefactor;       // 3 / (128 eta)
  double a2, a3, a4, a5, a6, a6_log, a7;

  explicit PnCoefficients(const MassParams& p) {
    const double eta = p.eta();
    const double eta2 = eta * eta;
    const double eta3 = eta2 * eta;
    velocity_scale = pi * p.total() * constants::solar_mass_time;
    prefactor = 3.0 / (128.0 * eta);
    a2 = 20.0 / 9.0 * (743.0 / 336.0 + 11.0 / 4.0 * eta);
    a3 = -16.0 * pi;
    a4 = 10.0 * (3058673.0 / 1016064.0 + 5429.0 / 1008.0 * eta + 617.0 / 144.0 * eta2);
    a5 = pi * (38645.0 / 756.0 - 65.0 / 9.0 * eta);
    a6 = 11583231236531.0 / 4694215680.0 - 640.0 / 3.0 * pi * pi -
         6848.0 / 21.0 * constants::euler_gamma +
         (-15737765635.0 / 3048192.0 + 2255.0 * pi * pi / 12.0) * eta +
         76055.0 / 1728.0 * eta2 - 127825.0 / 1296.0 * eta3;
    a6_log = -6848.0 / 21.0;
    a7 = pi * (77096675.0 / 254016.0 + 378515.0 / 1512.0 * eta - 74045.0 / 756.0 * eta2);
  }

  double phase(double f) const {
    const double v = std::cbrt(velocity_scale * f);
    const double log_v = std::log(v);
    const double v2 = v * v;
    const double v3 = v2 * v;
    const double v4 = v2 * v2;
    const double v5 = v4 * v;
    const double v6 = v3 * v3;
    const double v7 = v6 * v;
    const double series =
        1.0 + a2 * v2 + a3 * v3 + a4 * v4 +
        a5 * (1.0 + 3.0 * (log_v - std::log(constants::v_lso))) * v5 +
        (a6 + a6_log * (std::log(4.0) + log_v)) * v6 + a7 * v7;
    return prefactor / v5 * series;
  }
};

}  // namespace

double pn_phase(double f, const MassParams& params) {
  params.validate();
  require(f > 0.0, ErrorCode::DomainError, "phase needs f > 0");
  return PnCoefficients(params).phase(f);
}

double f_lso(double total_mass) {
  require(total_mass > 0.0, ErrorCode::DomainError, "total mass must be positive");
  const double v3 = constants::v_lso * constants::v_lso * constants::v_lso;
  return v3 / (pi * total_mass * constants::solar_mass_time);
}

Band band_limits(std::size_t N, double f_s, double f_low, double f_high) {
  const double n = static_cast<double>(N);
  const auto lo = static_cast<long long>(std::ceil(n * f_low / f_s));
  const auto hi_cut = static_cast<long long>(std::floor(n * f_high / f_s));
  Band b;
  b.k_lo = static_cast<std::size_t>(std::max(1LL, lo));
  b.k_hi = static_cast<std::size_t>(
      std::max(0LL, std::min(static_cast<long long>((N - 1) / 2), hi_cut)));
  return b;
}

Template generate_template(const MassParams& params, std::size_t N, double f_s,
                           const Psd& psd, double f_low) {
  params.validate();
  require(N >= 4 && f_s > 0.0, ErrorCode::InvalidArgument, "invalid series geometry");
  const double df = f_s / static_cast<double>(N);
  require(f_low >= df * (1.0 - 1e-12), ErrorCode::InvalidArgument,
          "low-frequency cutoff below one bin");
  require(std::abs(psd.delta_f() - df) <= 1e-9 * df, ErrorCode::BandError,
          "PSD resolution does not match the series");
  const Band band = band_limits(N, f_s, f_low, f_lso(params.total()));
  if (band.k_lo > band.k_hi)
    fail(ErrorCode::BandEmpty, "f_lso lies below the low-frequency cutoff");
  if (band.k_hi >= psd.size()) fail(ErrorCode::BandError, "PSD shorter than template band");

  const PnCoefficients pn(params);
  Template t;
  t.k_lo = band.k_lo;
  t.k_hi = band.k_hi;
  t.delta_f = df;
  t.origin_N = N;
  t.params = params;
  t.bins.resize(band.k_hi - band.k_lo + 1);

  double power = 0.0;
  for (std::size_t k = band.k_lo; k <= band.k_hi; ++k) {
    const double f = df * static_cast<double>(k);
    const double amp = std::pow(f, -7.0 / 6.0);
    const double arg = pi / 4.0 - pn.phase(f);
    t.bins[k - band.k_lo] = std::polar(amp, arg);
    power += amp * amp / psd[k];
  }
  power *= 4.0 * df;
  t.norm = 1.0 / std::sqrt(power);
  for (auto& b : t.bins) b *= t.norm;
  t.normalized = true;
  return t;
}

FrequencySeries embed(const Template& t) {
  FrequencySeries fs;
  fs.bins.assign(t.origin_N, cplx{});
  for (std::size_t k = t.k_lo; k <= t.k_hi; ++k) {
    fs.bins[k] = t.at(k);
    fs.bins[t.origin_N - k] = std::conj(t.at(k));
  }
  fs.delta_f = t.delta_f;
  fs.origin_N = t.origin_N;
  fs.origin_f_s = t.delta_f * static_cast<double>(t.origin_N);
  return fs;
}

TimeSeries template_time_domain(const Template& t) { return inverse_dft(embed(t)); }

void write_template_csv(const std::filesystem::path& path, const Template& t) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  out << "# m1=" << t.params.m1 << " m2=" << t.params.m2 << " N=" << t.origin_N
      << " k_lo=" << t.k_lo << " k_hi=" << t.k_hi << '\n';
  out << "k,f_Hz,re,im\n";
  for (std::size_t k = t.k_lo; k <= t.k_hi; ++k) {
    const cplx h = t.at(k);
    out << k << ',' << t.frequency(k) << ',' << h.real() << ',' << h.imag() << '\n';
  }
}

}  // namespace gwvqa
