#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gwvqa/psd.hpp"
#include "gwvqa/signal.hpp"
#include "gwvqa/waveform.hpp"

namespace gwvqa {

enum class Chart { M1M2, Theta1Eta, MEta, Theta1Theta2 };

Chart parse_chart(const std::string& name);
const char* chart_name(Chart chart);

/// Mass coordinate system. The chirp-time charts are dimensionless in units set
/// by the sampling frequency.
struct CoordChart {
  Chart tag = Chart::Theta1Eta;
  double f_s = 4096.0;
};

using Coords = std::array<double, 2>;

Coords to_chart(const MassParams& params, const CoordChart& chart);
// Returns m1 >= m2 for charts that do not distinguish the components.
MassParams from_chart(const Coords& coords, const CoordChart& chart);

/// Uniform 2^q1 x 2^q2 lattice over a chart box. Register 1 is the most
/// significant index block: j = j1 * J2 + j2.
struct Grid {
  CoordChart chart;
  Coords lo{};
  Coords hi{};
  std::array<std::size_t, 2> dims{};
  std::optional<MassParams> aligned_to;
  // Set when aligned: the lattice index that reproduces to_chart(aligned_to) bit-exactly.
  std::array<std::size_t, 2> anchor{};
  Coords anchor_coords{};

  std::size_t size() const { return dims[0] * dims[1]; }
  Coords step() const;
  Coords point(std::size_t j1, std::size_t j2) const;
  Coords point(std::size_t j) const { return point(j / dims[1], j % dims[1]); }
  std::size_t index(std::size_t j1, std::size_t j2) const { return j1 * dims[1] + j2; }
};

Grid build_grid(double m_min, double m_max, unsigned q1, unsigned q2, const CoordChart& chart,
                const std::optional<MassParams>& align = std::nullopt);

/// Quality function rho over a grid; the diagonal of the VQA objective.
struct QualityGrid {
  std::vector<double> values;
  Grid grid;
  double t_c = 0.0;
  double threshold = 8.0;
  bool binary = false;
  std::size_t marked = 0;       // J_S: points with rho > threshold
  std::size_t degenerate = 0;   // points scored 0 (empty band or unphysical)

  std::size_t size() const { return values.size(); }
};

std::size_t count_above(const std::vector<double>& values, double threshold);

// values[j] = snr_at(generate_template(from_chart(point(j))), y, psd, t_c).
QualityGrid evaluate_quality(const Grid& grid, const FrequencySeries& y, const Psd& psd,
                             double t_c, double f_low = 20.0, double rho0 = 8.0,
                             unsigned workers = 0);

QualityGrid binarize(const QualityGrid& qg, double rho0);

// Cache file: `{base}.json` header + `{base}.bin` f8le values.
// `color_range` records a shared colour scale for grids meant to be viewed together.
void write_quality_grid(const std::filesystem::path& base, const QualityGrid& qg,
                        const std::string& digest,
                        const std::optional<std::array<double, 2>>& color_range = std::nullopt);
struct CachedQualityGrid {
  QualityGrid grid;
  std::string digest;
  double vmin = 0.0;
  double vmax = 0.0;
};
CachedQualityGrid read_quality_grid(const std::filesystem::path& base);

}  // namespace gwvqa
