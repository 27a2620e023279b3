#include "gwvqa/statevector.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "gwvqa/error.hpp"
#include "gwvqa/fft.hpp"
#include "gwvqa/signal.hpp"

namespace gwvqa {

using std::numbers::pi;

double StateVector::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amps) acc += std::norm(a);
  return acc;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps.size());
  for (std::size_t j = 0; j < amps.size(); ++j) p[j] = std::norm(amps[j]);
  return p;
}

const char* mixer_name(MixerFamily family) {
  switch (family) {
    case MixerFamily::HypercubeGlobal: return "hypercube";
    case MixerFamily::CompleteGlobal: return "complete";
    case MixerFamily::CompletePerDim: return "complete-per-dim";
    case MixerFamily::CyclePerDim: return "cycle-per-dim";
  }
  return "?";
}

bool is_per_dim(MixerFamily family) {
  return family == MixerFamily::CompletePerDim || family == MixerFamily::CyclePerDim;
}

StateVector uniform_state(Dims dims) {
  const std::size_t J = dims.total();
  require(J >= 2, ErrorCode::DimensionError, "state needs J >= 2");
  StateVector s;
  s.dims = dims;
  s.amps.assign(J, std::complex<double>(1.0 / std::sqrt(static_cast<double>(J)), 0.0));
  return s;
}

StateVector basis_state(Dims dims, std::size_t j) {
  require(j < dims.total(), ErrorCode::DimensionError, "basis index out of range");
  StateVector s;
  s.dims = dims;
  s.amps.assign(dims.total(), {});
  s.amps[j] = 1.0;
  return s;
}

void apply_phase(StateVector& s, double gamma, std::span<const double> f) {
  if (f.size() != s.size()) fail(ErrorCode::DimensionError, "objective length differs from J");
  for (std::size_t j = 0; j < f.size(); ++j) s.amps[j] *= std::polar(1.0, -gamma * f[j]);
}

namespace {

void apply_hypercube(StateVector& s, double t) {
  const std::size_t J = s.size();
  if ((J & (J - 1)) != 0) fail(ErrorCode::DimensionError, "hypercube mixer needs J = 2^q");
  const double c = std::cos(t);
  const std::complex<double> ms(0.0, -std::sin(t));
  for (std::size_t bit = 1; bit < J; bit <<= 1) {
    for (std::size_t j = 0; j < J; ++j) {
      if (j & bit) continue;
      const auto a = s.amps[j];
      const auto b = s.amps[j | bit];
      s.amps[j] = c * a + ms * b;
      s.amps[j | bit] = ms * a + c * b;
    }
  }
}

// W = J P - I with P the projector onto the uniform state:
// exp(-i t W) = e^{i t} [I + (e^{-i t J} - 1) P].
void apply_complete(StateVector& s, double t) {
  const double J = static_cast<double>(s.size());
  std::complex<double> mean{};
  for (const auto& a : s.amps) mean += a;
  mean /= J;
  const std::complex<double> global = std::polar(1.0, t);
  const std::complex<double> shift = (std::polar(1.0, -t * J) - 1.0) * mean;
  for (auto& a : s.amps) a = global * (a + shift);
}

// Complete graph on one register: the same rank-one update applied to every
// fibre along `axis`.
void apply_complete_axis(StateVector& s, int axis, double t) {
  const std::size_t J1 = s.dims.j1, J2 = s.dims.j2;
  const std::size_t n = axis == 0 ? J1 : J2;
  const std::complex<double> global = std::polar(1.0, t);
  const std::complex<double> kick = std::polar(1.0, -t * static_cast<double>(n)) - 1.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  if (axis == 1) {
    for (std::size_t j1 = 0; j1 < J1; ++j1) {
      auto* row = s.amps.data() + j1 * J2;
      std::complex<double> mean{};
      for (std::size_t j2 = 0; j2 < J2; ++j2) mean += row[j2];
      const std::complex<double> shift = kick * mean * inv_n;
      for (std::size_t j2 = 0; j2 < J2; ++j2) row[j2] = global * (row[j2] + shift);
    }
    return;
  }
  std::vector<std::complex<double>> shift(J2);
  for (std::size_t j1 = 0; j1 < J1; ++j1)
    for (std::size_t j2 = 0; j2 < J2; ++j2) shift[j2] += s.amps[j1 * J2 + j2];
  for (auto& v : shift) v *= kick * inv_n;
  for (std::size_t j1 = 0; j1 < J1; ++j1)
    for (std::size_t j2 = 0; j2 < J2; ++j2) {
      auto& a = s.amps[j1 * J2 + j2];
      a = global * (a + shift[j2]);
    }
}

}  // namespace

std::vector<double> circulant_eigenvalues(MixerFamily family, std::size_t n) {
  std::vector<double> lambda(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (family == MixerFamily::CompletePerDim || family == MixerFamily::CompleteGlobal)
      lambda[k] = (k == 0 ? static_cast<double>(n) : 0.0) - 1.0;
    else if (family == MixerFamily::CyclePerDim)
      lambda[k] = 2.0 * std::cos(2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
    else
      fail(ErrorCode::InvalidArgument, "hypercube is not circulant");
  }
  return lambda;
}

void apply_circulant(StateVector& s, int axis, double t, std::span<const double> lambda) {
  const std::size_t J1 = s.dims.j1, J2 = s.dims.j2;
  const std::size_t n = axis == 0 ? J1 : J2;
  if (lambda.size() != n) fail(ErrorCode::DimensionError, "eigenvalue count differs from register size");
  const std::size_t howmany = axis == 0 ? J2 : J1;
  const std::size_t stride = axis == 0 ? J2 : 1;
  const std::size_t dist = axis == 0 ? 1 : J2;
  fft::transform_many(s.amps, n, howmany, stride, dist, fft::Direction::Forward);
  std::vector<std::complex<double>> factor(n);
  for (std::size_t k = 0; k < n; ++k)
    factor[k] = std::polar(1.0 / static_cast<double>(n), -t * lambda[k]);
  for (std::size_t j1 = 0; j1 < J1; ++j1)
    for (std::size_t j2 = 0; j2 < J2; ++j2)
      s.amps[j1 * J2 + j2] *= factor[axis == 0 ? j1 : j2];
  fft::transform_many(s.amps, n, howmany, stride, dist, fft::Direction::Backward);
}

void apply_mixer(StateVector& s, MixerFamily family, std::span<const double> times) {
  if (s.dims.total() != s.size()) fail(ErrorCode::DimensionError, "dims do not factor J");
  if (is_per_dim(family)) {
    if (times.size() != 2) fail(ErrorCode::ArityError, "per-dim mixer needs one time per register");
    if (s.dims.j1 < 2 || s.dims.j2 < 2)
      fail(ErrorCode::DimensionError, "per-dim mixer needs J1, J2 >= 2");
    for (int axis = 0; axis < 2; ++axis) {
      if (family == MixerFamily::CompletePerDim) {
        apply_complete_axis(s, axis, times[axis]);
        continue;
      }
      const auto lambda = circulant_eigenvalues(family, axis == 0 ? s.dims.j1 : s.dims.j2);
      apply_circulant(s, axis, times[axis], lambda);
    }
    return;
  }
  if (times.size() != 1) fail(ErrorCode::ArityError, "global mixer needs exactly one time");
  if (family == MixerFamily::HypercubeGlobal)
    apply_hypercube(s, times[0]);
  else
    apply_complete(s, times[0]);
}

double expectation(const StateVector& s, std::span<const double> f) {
  if (f.size() != s.size()) fail(ErrorCode::DimensionError, "objective length differs from J");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * std::norm(s.amps[j]);
  return acc;
}

double masked_probability(const StateVector& s, std::span<const unsigned char> mask) {
  if (mask.size() != s.size()) fail(ErrorCode::DimensionError, "mask length differs from J");
  double acc = 0.0;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) acc += std::norm(s.amps[j]);
  return acc;
}

double success_probability(const StateVector& s, const QualityGrid& q, double rho0) {
  if (q.size() != s.size()) fail(ErrorCode::DimensionError, "quality grid length differs from J");
  double acc = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const bool hit = q.binary ? q.values[j] == 1.0 : q.values[j] > rho0;
    if (hit) acc += std::norm(s.amps[j]);
  }
  return std::min(acc, 1.0);
}

void grover_iterate(StateVector& s, const QualityGrid& binary, unsigned p) {
  if (!binary.binary) fail(ErrorCode::TypeError, "Grover iteration needs a binary quality grid");
  if (binary.size() != s.size()) fail(ErrorCode::DimensionError, "quality grid length differs from J");
  const std::size_t marked = count_above(binary.values, 0.5);
  if (marked == 0) fail(ErrorCode::NoMarkedStates, "no marked states");
  const double t = pi / static_cast<double>(s.size());
  for (unsigned layer = 0; layer < p; ++layer) {
    apply_phase(s, pi, binary.values);
    apply_mixer(s, MixerFamily::CompleteGlobal, std::span<const double>(&t, 1));
  }
}

double grover_closed_form(std::size_t J, std::size_t marked, unsigned p) {
  const double theta = std::asin(std::sqrt(static_cast<double>(marked) / static_cast<double>(J)));
  const double v = std::sin((2.0 * p + 1.0) * theta);
  return v * v;
}

unsigned grover_full_depth(std::size_t J, std::size_t marked) {
  require(marked >= 1 && marked <= J, ErrorCode::NoMarkedStates, "need 1 <= J_S <= J");
  const double theta = std::asin(std::sqrt(static_cast<double>(marked) / static_cast<double>(J)));
  return static_cast<unsigned>(std::max(0.0, std::round(pi / (4.0 * theta) - 0.5)));
}

void write_state(const std::string& base, const StateVector& s) {
  nlohmann::json header = {{"dims", {s.dims.j1, s.dims.j2}}, {"dtype", "f8le"},
                           {"layout", "interleaved re/im"}};
  std::ofstream out(base + ".json");
  if (!out) fail(ErrorCode::IoError, "cannot write " + base + ".json");
  out << header.dump(2) << '\n';
  std::vector<double> flat(2 * s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    flat[2 * j] = s.amps[j].real();
    flat[2 * j + 1] = s.amps[j].imag();
  }
  io::write_f8le(base + ".bin", flat);
}

}  // namespace gwvqa
