#include "gwvqa/signal.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "gwvqa/error.hpp"
#include "gwvqa/fft.hpp"

namespace gwvqa {

TimeSeries::TimeSeries(std::vector<double> samples, double f_s, double t0)
    : samples_(std::move(samples)), f_s_(f_s), t0_(t0) {
  require(std::isfinite(f_s_) && f_s_ > 0.0, ErrorCode::InvalidArgument,
          "sampling frequency must be positive");
  require(samples_.size() >= 2, ErrorCode::InvalidArgument,
          "time series needs at least two samples");
  for (double s : samples_)
    require(std::isfinite(s), ErrorCode::DataError, "non-finite strain sample");
}

FrequencySeries forward_dft(const TimeSeriesView& ts) {
  require(ts.f_s > 0.0 && ts.size() >= 2, ErrorCode::InvalidArgument,
          "invalid time series");
  const std::size_t n = ts.size();
  FrequencySeries out;
  out.bins.assign(ts.samples.begin(), ts.samples.end());
  fft::transform(out.bins, fft::Direction::Forward);
  const double dt = 1.0 / ts.f_s;
  for (auto& b : out.bins) b *= dt;
  out.origin_N = n;
  out.origin_f_s = ts.f_s;
  out.delta_f = ts.f_s / static_cast<double>(n);
  return out;
}

std::vector<cplx> inverse_dft_complex(const FrequencySeries& fs) {
  require(fs.size() >= 2 && fs.delta_f > 0.0, ErrorCode::InvalidArgument,
          "invalid frequency series");
  std::vector<cplx> out = fs.bins;
  fft::transform(out, fft::Direction::Backward);
  for (auto& v : out) v *= fs.delta_f;
  return out;
}

TimeSeries inverse_dft(const FrequencySeries& fs, double t0) {
  const auto values = inverse_dft_complex(fs);
  std::vector<double> re(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) re[i] = values[i].real();
  const double f_s = fs.origin_f_s > 0.0
                         ? fs.origin_f_s
                         : fs.delta_f * static_cast<double>(fs.size());
  return TimeSeries(std::move(re), f_s, t0);
}

std::vector<double> hann_window(std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "window length must be >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    w[j] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / denom));
  return w;
}

std::vector<TimeSeriesView> segments(const TimeSeriesView& ts, std::size_t seg_len,
                                     std::size_t overlap) {
  require(seg_len > 0 && overlap < seg_len, ErrorCode::InvalidArgument,
          "require 0 <= overlap < seg_len");
  if (seg_len > ts.size())
    fail(ErrorCode::EmptySegmentation, "segment longer than series");
  const std::size_t stride = seg_len - overlap;
  std::vector<TimeSeriesView> out;
  for (std::size_t off = 0; off + seg_len <= ts.size(); off += stride)
    out.push_back({ts.samples.subspan(off, seg_len), ts.f_s,
                   ts.t0 + static_cast<double>(off) / ts.f_s});
  return out;
}

namespace io {

void write_f8le(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  std::vector<char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(buf.data() + 8 * i, &bits, 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
}

std::vector<double> read_f8le(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<char> buf(expected * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    fail(ErrorCode::DataError, "payload shorter than header count in " + path.string());
  if (in.peek() != std::char_traits<char>::eof())
    fail(ErrorCode::DataError, "payload longer than header count in " + path.string());
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, buf.data() + 8 * i, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace io

void write_strain(const std::filesystem::path& base, const TimeSeries& ts,
                  const std::string& detector) {
  auto stem = base;
  if (stem.extension() == ".json" || stem.extension() == ".bin") stem.replace_extension();
  nlohmann::json header = {{"f_s", ts.f_s()},     {"t0", ts.t0()},
                           {"n", ts.size()},      {"detector", detector},
                           {"dtype", "f8le"}};
  auto json_path = stem;
  json_path += ".json";
  auto bin_path = stem;
  bin_path += ".bin";
  std::ofstream out(json_path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + json_path.string());
  out << header.dump(2) << '\n';
  io::write_f8le(bin_path, ts.samples());
}

void write_strain_csv(const std::filesystem::path& path, const TimeSeries& ts,
                      const std::string& detector) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  out << "# f_s=" << ts.f_s() << "\n# t0=" << ts.t0() << "\n# detector=" << detector
      << '\n';
  for (double s : ts.samples()) out << s << '\n';
}

namespace {

StrainFile read_strain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  double f_s = 0.0, t0 = 0.0;
  std::string detector;
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "f_s") f_s = std::stod(value);
        else if (key == "t0") t0 = std::stod(value);
        else if (key == "detector") detector = value;
      } catch (const std::exception&) {
        fail(ErrorCode::DataError, "bad header value in " + path.string());
      }
      continue;
    }
    try {
      samples.push_back(std::stod(line));
    } catch (const std::exception&) {
      fail(ErrorCode::DataError, "bad sample line in " + path.string() + ": " + line);
    }
  }
  if (f_s <= 0.0) fail(ErrorCode::DataError, "missing '# f_s=' header in " + path.string());
  return {TimeSeries(std::move(samples), f_s, t0), detector};
}

}  // namespace

StrainFile read_strain(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_strain_csv(path);
  auto stem = path;
  if (stem.extension() == ".json" || stem.extension() == ".bin") stem.replace_extension();
  auto json_path = stem;
  json_path += ".json";
  auto bin_path = stem;
  bin_path += ".bin";
  std::ifstream in(json_path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + json_path.string());
  nlohmann::json header;
  try {
    in >> header;
    if (header.value("dtype", std::string("f8le")) != "f8le")
      fail(ErrorCode::DataError, "unsupported dtype in " + json_path.string());
    const auto n = header.at("n").get<std::size_t>();
    auto samples = io::read_f8le(bin_path, n);
    return {TimeSeries(std::move(samples), header.at("f_s").get<double>(),
                       header.value("t0", 0.0)),
            header.value("detector", std::string())};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::DataError, "malformed strain header " + json_path.string() + ": " + e.what());
  }
}

}  // namespace gwvqa
