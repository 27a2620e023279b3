#include "gwvqa/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gwvqa/error.hpp"

namespace gwvqa::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 150.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Roughly five ticks at 1/2/5 multiples.
std::vector<double> ticks(double lo, double hi) {
  std::vector<double> out;
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

// Viridis anchors, linearly interpolated.
std::string colour(double u) {
  static const double anchors[][3] = {{68, 1, 84},    {59, 82, 139},  {33, 145, 140},
                                      {94, 201, 98},  {253, 231, 37}};
  u = std::clamp(std::isfinite(u) ? u : 0.0, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double w = u - i;
  char buf[8];
  const auto c = [&](int ch) {
    return static_cast<int>(std::lround(anchors[i][ch] * (1 - w) + anchors[i + 1][ch] * w));
  };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(0), c(1), c(2));
  return buf;
}

struct Frame {
  double x_lo, x_hi, y_lo, y_hi;
  double px(double x) const {
    return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
  }
};

void open_document(std::ostringstream& os, const Axes& axes) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(axes.title) << "</text>\n";
}

void draw_axes(std::ostringstream& os, const Axes& axes, const Frame& f) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
     << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(f.x_lo, f.x_hi)) {
    const double x = f.px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << y0 << "\" x2=\"" << x << "\" y2=\"" << y0 + 5
       << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << y0 + 18
       << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ticks(f.y_lo, f.y_hi)) {
    const double y = f.py(t);
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << y << "\" x2=\"" << x0 << "\" y2=\"" << y
       << "\" stroke=\"black\"/><text x=\"" << x0 - 8 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 14
     << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (y0 + y1) / 2 << ")\">" << escape(axes.y_label) << "</text>\n";
}

}  // namespace

std::string line_plot(const Axes& axes, const std::vector<Series>& series) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i] - e);
      y_hi = std::max(y_hi, s.y[i] + e);
    }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
  const double pad = 0.05 * (y_hi - y_lo);
  const Frame f{x_lo, x_hi, y_lo - pad, y_hi + pad};

  std::ostringstream os;
  open_document(os, axes);
  draw_axes(os, axes, f);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double x = f.px(s.x[i]);
      os << "<circle cx=\"" << x << "\" cy=\"" << f.py(s.y[i]) << "\" r=\"2.5\" fill=\"" << col
         << "\"/>\n";
      if (i < s.err.size() && s.err[i] > 0.0)
        os << "<line x1=\"" << x << "\" y1=\"" << f.py(s.y[i] - s.err[i]) << "\" x2=\"" << x
           << "\" y2=\"" << f.py(s.y[i] + s.err[i]) << "\" stroke=\"" << col << "\"/>\n";
    }
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
       << kWidth - kRight + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << col
       << "\" stroke-width=\"2\"/><text x=\"" << kWidth - kRight + 36 << "\" y=\"" << ly << "\">"
       << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const Axes& axes, const std::vector<double>& values, std::size_t rows,
                    std::size_t cols, std::array<double, 4> extent, double vmin, double vmax) {
  require(rows * cols == values.size() && rows > 0 && cols > 0, ErrorCode::InvalidArgument,
          "heatmap shape does not match its values");
  if (!(vmax > vmin)) vmax = vmin + 1.0;
  const Frame f{extent[0], extent[1], extent[2], extent[3]};
  std::ostringstream os;
  open_document(os, axes);
  const double cw = (f.px(extent[1]) - f.px(extent[0])) / static_cast<double>(cols);
  const double ch = (f.py(extent[2]) - f.py(extent[3])) / static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = values[r * cols + c];
      os << "<rect x=\"" << kLeft + cw * static_cast<double>(c) << "\" y=\""
         << kHeight - kBottom - ch * static_cast<double>(r + 1) << "\" width=\"" << cw + 0.05
         << "\" height=\"" << ch + 0.05 << "\" fill=\"" << colour((v - vmin) / (vmax - vmin))
         << "\"/>\n";
    }
  draw_axes(os, axes, f);
  const double bx = kWidth - kRight + 20, bh = kHeight - kTop - kBottom;
  for (int i = 0; i < 64; ++i)
    os << "<rect x=\"" << bx << "\" y=\"" << kTop + bh * (63 - i) / 64.0 << "\" width=\"16\" height=\""
       << bh / 64.0 + 0.05 << "\" fill=\"" << colour(i / 63.0) << "\"/>\n";
  os << "<text x=\"" << bx + 22 << "\" y=\"" << kTop + 10 << "\">" << num(vmax) << "</text>\n"
     << "<text x=\"" << bx + 22 << "\" y=\"" << kTop + bh << "\">" << num(vmin) << "</text>\n"
     << "</svg>\n";
  return os.str();
}

void save(const std::filesystem::path& path, const std::string& document) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << document;
}

}  // namespace gwvqa::svg
