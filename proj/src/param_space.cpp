#include "gwvqa/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "gwvqa/error.hpp"
#include "gwvqa/matched_filter.hpp"
#include "gwvqa/parallel.hpp"

namespace gwvqa {

using std::numbers::pi;

Chart parse_chart(const std::string& name) {
  if (name == "m1m2") return Chart::M1M2;
  if (name == "theta1eta") return Chart::Theta1Eta;
  if (name == "meta") return Chart::MEta;
  if (name == "theta1theta2") return Chart::Theta1Theta2;
  fail(ErrorCode::ConfigError, "unknown chart '" + name + "'");
}

const char* chart_name(Chart chart) {
  switch (chart) {
    case Chart::M1M2: return "m1m2";
    case Chart::Theta1Eta: return "theta1eta";
    case Chart::MEta: return "meta";
    case Chart::Theta1Theta2: return "theta1theta2";
  }
  return "?";
}

namespace {

// pi G M f_s / c^3 for total mass M in solar masses.
double scaled_mass(double total, double f_s) {
  return pi * total * constants::solar_mass_time * f_s;
}

double theta1(double total, double eta, double f_s) {
  return 5.0 / 128.0 * std::pow(scaled_mass(total, f_s), -5.0 / 3.0) / eta;
}

double theta2(double total, double eta, double f_s) {
  return pi / 4.0 * std::pow(scaled_mass(total, f_s), -2.0 / 3.0) / eta;
}

MassParams from_total_eta(double total, double eta) {
  if (!(total > 0.0) || !std::isfinite(total))
    fail(ErrorCode::DomainError, "total mass must be positive");
  if (!(eta > 0.0)) fail(ErrorCode::DomainError, "symmetric mass ratio must be positive");
  if (eta > 0.25) fail(ErrorCode::UnphysicalCoordinates, "symmetric mass ratio above 1/4");
  const double root = std::sqrt(1.0 - 4.0 * eta);
  return {0.5 * total * (1.0 + root), 0.5 * total * (1.0 - root)};
}

}  // namespace

Coords to_chart(const MassParams& params, const CoordChart& chart) {
  params.validate();
  const double total = params.total();
  const double eta = params.eta();
  switch (chart.tag) {
    case Chart::M1M2: return {params.m1, params.m2};
    case Chart::Theta1Eta: return {theta1(total, eta, chart.f_s), eta};
    case Chart::MEta: return {total, eta};
    case Chart::Theta1Theta2:
      return {theta1(total, eta, chart.f_s), theta2(total, eta, chart.f_s)};
  }
  fail(ErrorCode::Internal, "unhandled chart");
}

MassParams from_chart(const Coords& c, const CoordChart& chart) {
  if (!std::isfinite(c[0]) || !std::isfinite(c[1]))
    fail(ErrorCode::DomainError, "non-finite chart coordinates");
  switch (chart.tag) {
    case Chart::M1M2: {
      if (!(c[0] > 0.0 && c[1] > 0.0)) fail(ErrorCode::DomainError, "masses must be positive");
      return {c[0], c[1]};
    }
    case Chart::MEta: return from_total_eta(c[0], c[1]);
    case Chart::Theta1Eta: {
      if (!(c[0] > 0.0)) fail(ErrorCode::DomainError, "theta1 must be positive");
      if (!(c[1] > 0.0)) fail(ErrorCode::DomainError, "symmetric mass ratio must be positive");
      if (c[1] > 0.25) fail(ErrorCode::UnphysicalCoordinates, "symmetric mass ratio above 1/4");
      // theta1 * eta = (5/128) x^{-5/3}, x = pi G M f_s / c^3
      const double x = std::pow(5.0 / (128.0 * c[0] * c[1]), 0.6);
      return from_total_eta(x / (pi * constants::solar_mass_time * chart.f_s), c[1]);
    }
    case Chart::Theta1Theta2: {
      if (!(c[0] > 0.0 && c[1] > 0.0)) fail(ErrorCode::DomainError, "chirp times must be positive");
      // theta1 / theta2 = (5 / (32 pi)) x^{-1}
      const double x = 5.0 / (32.0 * pi) * c[1] / c[0];
      const double total = x / (pi * constants::solar_mass_time * chart.f_s);
      const double eta = 5.0 / 128.0 * std::pow(x, -5.0 / 3.0) / c[0];
      return from_total_eta(total, eta);
    }
  }
  fail(ErrorCode::Internal, "unhandled chart");
}

Coords Grid::step() const {
  return {(hi[0] - lo[0]) / static_cast<double>(dims[0] - 1),
          (hi[1] - lo[1]) / static_cast<double>(dims[1] - 1)};
}

Coords Grid::point(std::size_t j1, std::size_t j2) const {
  const Coords s = step();
  const std::array<std::size_t, 2> j{j1, j2};
  Coords out;
  for (int d = 0; d < 2; ++d) {
    if (aligned_to) {
      const double offset = static_cast<double>(j[d]) - static_cast<double>(anchor[d]);
      out[d] = anchor_coords[d] + s[d] * offset;
    } else if (j[d] == dims[d] - 1) {
      out[d] = hi[d];
    } else {
      out[d] = lo[d] + s[d] * static_cast<double>(j[d]);
    }
  }
  return out;
}

Grid build_grid(double m_min, double m_max, unsigned q1, unsigned q2, const CoordChart& chart,
                const std::optional<MassParams>& align) {
  require(m_min > 0.0 && m_min < m_max, ErrorCode::InvalidArgument,
          "mass region needs 0 < m_min < m_max");
  require(q1 >= 1 && q2 >= 1 && q1 + q2 <= 30, ErrorCode::InvalidArgument,
          "register sizes must satisfy q >= 1 and q1 + q2 <= 30");
  require(chart.f_s > 0.0, ErrorCode::InvalidArgument, "chart needs f_s > 0");

  Grid g;
  g.chart = chart;
  g.dims = {std::size_t{1} << q1, std::size_t{1} << q2};
  g.lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  g.hi = {-g.lo[0], -g.lo[1]};
  auto include = [&](double a, double b) {
    const Coords c = to_chart({a, b}, chart);
    for (int d = 0; d < 2; ++d) {
      g.lo[d] = std::min(g.lo[d], c[d]);
      g.hi[d] = std::max(g.hi[d], c[d]);
    }
  };
  if (chart.tag == Chart::M1M2) {
    g.lo = {m_min, m_min};
    g.hi = {m_max, m_max};
  } else {
    // Every chart is symmetric under m1 <-> m2, so the triangle m_min <= m1 <= m2 <= m_max
    // suffices. Its corners, two edges and the equal-mass diagonal bound all charts
    // (none has an interior critical point); edges are sampled densely because
    // theta2 attains its minimum mid-edge.
    include(m_min, m_min);
    include(m_min, m_max);
    include(m_max, m_max);
    constexpr int samples = 4096;
    for (int i = 1; i < samples; ++i) {
      const double m = m_min + (m_max - m_min) * i / samples;
      include(m_min, m);
      include(m, m_max);
      include(m, m);
    }
  }

  if (align) {
    align->validate();
    const Coords target = to_chart(*align, chart);
    const Coords s = g.step();
    for (int d = 0; d < 2; ++d) {
      const double u = (target[d] - g.lo[d]) / s[d];
      const double last = static_cast<double>(g.dims[d] - 1);
      if (!(u >= -0.5 && u <= last + 0.5))
        fail(ErrorCode::AlignmentError, "alignment point lies outside the grid box");
      const auto j = static_cast<std::size_t>(std::clamp(std::round(u), 0.0, last));
      const double shift = target[d] - (g.lo[d] + s[d] * static_cast<double>(j));
      g.lo[d] += shift;
      g.hi[d] += shift;
      g.anchor[d] = j;
      g.anchor_coords[d] = target[d];
    }
    g.aligned_to = align;
  }
  return g;
}

std::size_t count_above(const std::vector<double>& values, double threshold) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
}

QualityGrid evaluate_quality(const Grid& grid, const FrequencySeries& y, const Psd& psd,
                             double t_c, double f_low, double rho0, unsigned workers) {
  const std::size_t n = y.origin_N;
  const double f_s = y.origin_f_s;
  require(n == y.size() && f_s > 0.0, ErrorCode::InvalidArgument,
          "data spectrum must be a full DFT of a time series");
  QualityGrid qg;
  qg.grid = grid;
  qg.t_c = t_c;
  qg.threshold = rho0;
  qg.values.assign(grid.size(), 0.0);
  std::vector<unsigned char> degenerate(grid.size(), 0);

  parallel_for(grid.size(), workers == 0 ? default_workers() : workers, [&](std::size_t j) {
    try {
      const MassParams params = from_chart(grid.point(j), grid.chart);
      const Template t = generate_template(params, n, f_s, psd, f_low);
      qg.values[j] = snr_at(t, y, psd, t_c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BandEmpty && e.code() != ErrorCode::UnphysicalCoordinates &&
          e.code() != ErrorCode::DomainError)
        throw;
      degenerate[j] = 1;
    }
  });
  qg.degenerate = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  qg.marked = count_above(qg.values, rho0);
  return qg;
}

QualityGrid binarize(const QualityGrid& qg, double rho0) {
  if (qg.binary) fail(ErrorCode::TypeError, "quality grid is already binary");
  QualityGrid out = qg;
  out.binary = true;
  out.threshold = rho0;
  for (auto& v : out.values) v = v > rho0 ? 1.0 : 0.0;
  out.marked = count_above(qg.values, rho0);
  return out;
}

void write_quality_grid(const std::filesystem::path& base, const QualityGrid& qg,
                        const std::string& digest,
                        const std::optional<std::array<double, 2>>& color_range) {
  const Grid& g = qg.grid;
  nlohmann::json header = {
      {"chart", chart_name(g.chart.tag)},
      {"f_s", g.chart.f_s},
      {"lo", {g.lo[0], g.lo[1]}},
      {"hi", {g.hi[0], g.hi[1]}},
      {"dims", {g.dims[0], g.dims[1]}},
      {"t_c", qg.t_c},
      {"rho0", qg.threshold},
      {"binary", qg.binary},
      {"marked", qg.marked},
      {"degenerate", qg.degenerate},
      {"digest", digest},
      {"dtype", "f8le"},
  };
  if (g.aligned_to) {
    header["aligned_to"] = {g.aligned_to->m1, g.aligned_to->m2};
    header["anchor"] = {g.anchor[0], g.anchor[1]};
    header["anchor_coords"] = {g.anchor_coords[0], g.anchor_coords[1]};
  }
  if (color_range) header["color_range"] = {(*color_range)[0], (*color_range)[1]};
  auto stem = base;
  if (stem.extension() == ".json" || stem.extension() == ".bin") stem.replace_extension();
  auto json_path = stem;
  json_path += ".json";
  auto bin_path = stem;
  bin_path += ".bin";
  std::ofstream out(json_path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + json_path.string());
  out << header.dump(2) << '\n';
  io::write_f8le(bin_path, qg.values);
}

CachedQualityGrid read_quality_grid(const std::filesystem::path& base) {
  auto stem = base;
  if (stem.extension() == ".json" || stem.extension() == ".bin") stem.replace_extension();
  auto json_path = stem;
  json_path += ".json";
  auto bin_path = stem;
  bin_path += ".bin";
  std::ifstream in(json_path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + json_path.string());
  try {
    nlohmann::json h;
    in >> h;
    CachedQualityGrid out;
    Grid& g = out.grid.grid;
    g.chart = {parse_chart(h.at("chart").get<std::string>()), h.at("f_s").get<double>()};
    g.lo = {h.at("lo")[0].get<double>(), h.at("lo")[1].get<double>()};
    g.hi = {h.at("hi")[0].get<double>(), h.at("hi")[1].get<double>()};
    g.dims = {h.at("dims")[0].get<std::size_t>(), h.at("dims")[1].get<std::size_t>()};
    if (h.contains("aligned_to")) {
      g.aligned_to = MassParams{h["aligned_to"][0].get<double>(), h["aligned_to"][1].get<double>()};
      g.anchor = {h.at("anchor")[0].get<std::size_t>(), h.at("anchor")[1].get<std::size_t>()};
      g.anchor_coords = {h.at("anchor_coords")[0].get<double>(),
                         h.at("anchor_coords")[1].get<double>()};
    }
    out.grid.t_c = h.at("t_c").get<double>();
    out.grid.threshold = h.at("rho0").get<double>();
    out.grid.binary = h.at("binary").get<bool>();
    out.grid.degenerate = h.value("degenerate", std::size_t{0});
    out.digest = h.value("digest", std::string());
    out.grid.values = io::read_f8le(bin_path, g.size());
    out.grid.marked = out.grid.binary ? count_above(out.grid.values, 0.5)
                                      : count_above(out.grid.values, out.grid.threshold);
    if (h.contains("color_range")) {
      out.vmin = h["color_range"][0].get<double>();
      out.vmax = h["color_range"][1].get<double>();
    } else if (!out.grid.values.empty()) {
      auto [mn, mx] = std::minmax_element(out.grid.values.begin(), out.grid.values.end());
      out.vmin = *mn;
      out.vmax = *mx;
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::DataError, "malformed quality grid header: " + std::string(e.what()));
  }
}

}  // namespace gwvqa
