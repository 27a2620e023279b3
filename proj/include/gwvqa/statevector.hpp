#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gwvqa/param_space.hpp"

namespace gwvqa {

/// Register factorization J = J1 * J2, register 1 most significant.
struct Dims {
  std::size_t j1 = 1;
  std::size_t j2 = 1;

  std::size_t total() const { return j1 * j2; }
  bool operator==(const Dims&) const = default;
};

/// Exact amplitudes over the grid basis |j>, j = j1 * J2 + j2.
struct StateVector {
  std::vector<std::complex<double>> amps;
  Dims dims;

  std::size_t size() const { return amps.size(); }
  double norm_squared() const;
  std::vector<double> probabilities() const;
};

enum class MixerFamily {
  HypercubeGlobal,  // sum of X on each of log2 J qubits
  CompleteGlobal,   // complete graph on all J vertices
  CompletePerDim,   // complete graph on each register
  CyclePerDim,      // cycle graph on each register
};

const char* mixer_name(MixerFamily family);
bool is_per_dim(MixerFamily family);

StateVector uniform_state(Dims dims);
StateVector basis_state(Dims dims, std::size_t j);

// amps[j] *= exp(-i gamma f(j))
void apply_phase(StateVector& s, double gamma, std::span<const double> f);

// exp(-i t W) for the family's adjacency W; `times` holds one value for global
// families and one per register for per-dim families.
void apply_mixer(StateVector& s, MixerFamily family, std::span<const double> times);

// exp(-i t W_d) on register d (0 or 1) for a circulant W_d with eigenvalues `lambda`
// in the DFT basis of that register.
void apply_circulant(StateVector& s, int axis, double t, std::span<const double> lambda);

std::vector<double> circulant_eigenvalues(MixerFamily family, std::size_t n);

double expectation(const StateVector& s, std::span<const double> f);

// Probability mass on points with f > rho0, or on f == 1 for a binary grid.
double success_probability(const StateVector& s, const QualityGrid& q, double rho0);
double masked_probability(const StateVector& s, std::span<const unsigned char> mask);

// p rounds of {phase(pi) on the marked set, complete-graph mixer at t = pi / J}.
void grover_iterate(StateVector& s, const QualityGrid& binary, unsigned p);

double grover_closed_form(std::size_t J, std::size_t marked, unsigned p);
unsigned grover_full_depth(std::size_t J, std::size_t marked);

// Debug dump: `{base}.json` (dims) + `{base}.bin` interleaved re/im f8le.
void write_state(const std::string& base, const StateVector& s);

}  // namespace gwvqa
