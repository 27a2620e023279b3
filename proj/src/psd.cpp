#include "gwvqa/psd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gwvqa/error.hpp"
#include "gwvqa/fft.hpp"

namespace gwvqa {

Psd::Psd(std::vector<double> s_k, double delta_f) : s_k_(std::move(s_k)), delta_f_(delta_f) {
  require(s_k_.size() >= 2, ErrorCode::InvalidArgument, "PSD needs at least two bins");
  require(std::isfinite(delta_f_) && delta_f_ > 0.0, ErrorCode::InvalidArgument,
          "PSD bin width must be positive");
  for (double s : s_k_)
    require(std::isfinite(s) && s > 0.0, ErrorCode::DataError,
            "PSD values must be positive and finite");
}

PsdMethod parse_psd_method(const std::string& name) {
  if (name == "median") return PsdMethod::Median;
  if (name == "mean") return PsdMethod::Mean;
  fail(ErrorCode::ConfigError, "unknown PSD method '" + name + "'");
}

const char* psd_method_name(PsdMethod method) {
  return method == PsdMethod::Median ? "median" : "mean";
}

double median_bias(std::size_t n) {
  double bias = 1.0;
  for (std::size_t i = 1; i <= (n - 1) / 2; ++i) {
    const double even = 2.0 * static_cast<double>(i);
    bias += 1.0 / (even + 1.0) - 1.0 / even;
  }
  return bias;
}

namespace {

// Fixed-shape pairwise sum so the mean does not depend on evaluation order.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

Psd estimate_psd(const TimeSeriesView& ts, const PsdSettings& settings) {
  require(settings.overlap_frac >= 0.0 && settings.overlap_frac < 1.0,
          ErrorCode::InvalidArgument, "overlap fraction must lie in [0, 1)");
  const auto seg_len = static_cast<std::size_t>(std::llround(settings.seg_seconds * ts.f_s));
  require(seg_len >= 16, ErrorCode::InvalidArgument, "segment must hold >= 16 samples");
  const auto overlap = static_cast<std::size_t>(
      std::llround(settings.overlap_frac * static_cast<double>(seg_len)));
  if (seg_len > ts.size())
    fail(ErrorCode::InsufficientData, "series shorter than one PSD segment");
  const auto segs = segments(ts, seg_len, std::min(overlap, seg_len - 1));
  if (segs.size() < 2) fail(ErrorCode::InsufficientData, "PSD estimate needs >= 2 segments");

  const auto window = hann_window(seg_len);
  double wss = 0.0;
  for (double w : window) wss += w * w;
  const double scale = 2.0 / (ts.f_s * wss);
  const std::size_t n_bins = seg_len / 2 + 1;

  // periodograms[k * n_segs + s]
  const std::size_t n_segs = segs.size();
  std::vector<double> periodograms(n_bins * n_segs);
  std::vector<cplx> buf(seg_len);
  for (std::size_t s = 0; s < n_segs; ++s) {
    for (std::size_t j = 0; j < seg_len; ++j) buf[j] = segs[s].samples[j] * window[j];
    fft::transform(buf, fft::Direction::Forward);
    for (std::size_t k = 0; k < n_bins; ++k)
      periodograms[k * n_segs + s] = std::norm(buf[k]) * scale;
  }

  std::vector<double> out(n_bins);
  std::vector<double> column(n_segs);
  const double bias = settings.method == PsdMethod::Median ? median_bias(n_segs) : 1.0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    std::span<const double> col(periodograms.data() + k * n_segs, n_segs);
    if (settings.method == PsdMethod::Mean) {
      out[k] = pairwise_sum(col) / static_cast<double>(n_segs);
    } else {
      std::copy(col.begin(), col.end(), column.begin());
      out[k] = median_of(column) / bias;
    }
  }
  return Psd(std::move(out), ts.f_s / static_cast<double>(seg_len));
}

Psd condition_psd(const Psd& psd, std::size_t target_N, double target_f_s,
                  double floor_frac, double f_low) {
  require(target_N >= 2 && target_f_s > 0.0, ErrorCode::InvalidArgument,
          "invalid target grid");
  const double df = target_f_s / static_cast<double>(target_N);
  const std::size_t n_bins = target_N / 2 + 1;
  const double top = df * static_cast<double>(n_bins - 1);
  if (top > psd.nyquist() * (1.0 + 1e-12))
    fail(ErrorCode::FrequencyRange, "target grid extends above the PSD Nyquist frequency");

  const auto src = psd.values();
  const double smax = *std::max_element(src.begin(), src.end());
  std::vector<double> out(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double pos = df * static_cast<double>(k) / psd.delta_f();
    auto i = static_cast<std::size_t>(std::floor(pos));
    double frac = pos - static_cast<double>(i);
    if (i >= src.size() - 1) {
      i = src.size() - 2;
      frac = 1.0;
    }
    double value;
    if (frac == 0.0) {
      value = src[i];
    } else if (frac == 1.0) {
      value = src[i + 1];
    } else {
      value = std::exp((1.0 - frac) * std::log(src[i]) + frac * std::log(src[i + 1]));
    }
    if (df * static_cast<double>(k) < f_low) value = std::max(value, floor_frac * smax);
    out[k] = value;
  }
  return Psd(std::move(out), df);
}

void write_psd_csv(const std::filesystem::path& path, const Psd& psd,
                   const std::optional<PsdSettings>& settings) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  if (settings) {
    out << "# method=" << psd_method_name(settings->method) << '\n'
        << "# seg_seconds=" << settings->seg_seconds << '\n'
        << "# overlap=" << settings->overlap_frac << '\n';
  }
  out << "# delta_f=" << psd.delta_f() << '\n';
  out << "f_Hz,S\n";
  for (std::size_t k = 0; k < psd.size(); ++k)
    out << psd.delta_f() * static_cast<double>(k) << ',' << psd[k] << '\n';
}

Psd read_psd_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<double> freqs, values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("f_Hz", 0) == 0) continue;
    std::istringstream row(line);
    double f, s;
    char comma;
    if (!(row >> f >> comma >> s) || comma != ',')
      fail(ErrorCode::DataError, "bad PSD row in " + path.string() + ": " + line);
    freqs.push_back(f);
    values.push_back(s);
  }
  if (freqs.size() < 2) fail(ErrorCode::DataError, "PSD file has fewer than two rows");
  const double df = freqs[1] - freqs[0];
  for (std::size_t k = 0; k < freqs.size(); ++k)
    if (std::abs(freqs[k] - df * static_cast<double>(k)) > 1e-6 * df * static_cast<double>(k + 1))
      fail(ErrorCode::DataError, "PSD frequencies must be uniform from 0 Hz");
  return Psd(std::move(values), df);
}

}  // namespace gwvqa
