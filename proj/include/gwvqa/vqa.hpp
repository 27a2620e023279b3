#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gwvqa/numopt.hpp"
#include "gwvqa/param_space.hpp"
#include "gwvqa/statevector.hpp"

namespace gwvqa {

enum class Variant { QaoaHypercube, QaoaComplete, QmoaComplete, QmoaCycle, Rdgs };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);
MixerFamily mixer_for(Variant v);

// 2p for QAOA variants, 3p for the two-register QMOA variants, 0 for RDGS.
std::size_t parameter_count(Variant v, unsigned depth);

/// Ansatz and the quality landscape it is run against. Parameters are laid out
/// layer by layer: (gamma_l, t_l) for QAOA, (gamma_l, t1_l, t2_l) for QMOA.
struct AnsatzConfig {
  Variant variant = Variant::QaoaComplete;
  unsigned depth = 1;
  std::shared_ptr<const QualityGrid> quality;
  bool binary_cost = false;
  double rho0 = 8.0;

  Dims dims() const { return {quality->grid.dims[0], quality->grid.dims[1]}; }
};

struct RunResult {
  Variant variant = Variant::QaoaComplete;
  unsigned depth = 0;
  std::vector<double> params_star;
  std::vector<double> params_init;
  double expectation = 0.0;   // <cost>; equals success_prob under binary cost
  double quality_expectation = 0.0;  // <Q> against the non-binary rho grid
  double success_prob = 0.0;  // Prob[rho > rho0]
  std::uint64_t seed = 0;
  OptimizeReport report;
  std::size_t oracle_calls = 0;
  double wall_time = 0.0;
  bool failed = false;
  std::string error;
};

struct RepeatStats {
  Variant variant = Variant::QaoaComplete;
  unsigned depth = 0;
  double mean_expectation = 0.0;
  double std_expectation = 0.0;
  double mean_success = 0.0;
  double std_success = 0.0;
  double mean_iters = 0.0;
  double mean_wall_s = 0.0;
  std::size_t n_repeats = 0;
  bool partial = false;
};

/// Objective landscape shared by all runs of one configuration: the cost
/// diagonal (rho or its binarization) plus the success mask.
struct Landscape {
  std::vector<double> cost;
  std::vector<double> quality;
  std::vector<unsigned char> success_mask;
  Dims dims;
  std::size_t marked = 0;
};

Landscape make_landscape(const AnsatzConfig& config);

StateVector evaluate_ansatz(const AnsatzConfig& config, std::span<const double> params);
StateVector evaluate_ansatz(const AnsatzConfig& config, const Landscape& land,
                            std::span<const double> params, std::size_t* oracle_calls = nullptr);

// Seeded initial parameters: gamma ~ U(0, 0.5]; t ~ U(0, 0.5] for hypercube and
// cycle mixers, t ~ U(0, 2 pi / J_eff] for complete-graph mixers.
std::vector<double> initial_parameters(const AnsatzConfig& config, std::uint64_t seed);

RunResult optimize_run(const AnsatzConfig& config, std::uint64_t seed,
                       const BfgsOptions& options = {});
// Same as optimize_run but starting from the given parameters.
RunResult optimize_from(const AnsatzConfig& config, std::vector<double> init,
                        std::uint64_t seed, const BfgsOptions& options = {});

RunResult rdgs_run(const AnsatzConfig& config);

RepeatStats aggregate(std::span<const RunResult> runs);

using RunSink = std::function<void(const RunResult&)>;

RepeatStats repeat_study(const AnsatzConfig& config, unsigned n_repeats, std::uint64_t base_seed,
                         const BfgsOptions& options = {}, unsigned workers = 1,
                         std::vector<RunResult>* runs_out = nullptr);

struct SweepOptions {
  bool binary_cost = false;
  double rho0 = 8.0;
  unsigned n_repeats = 10;
  std::uint64_t base_seed = 1;
  BfgsOptions bfgs;
  unsigned workers = 1;
};

using CellSink = std::function<void(const RepeatStats&)>;

// One RepeatStats per (variant, depth), variants outermost. RDGS rows are
// deterministic single runs. `sink` receives every individual run and `on_cell`
// every finished row, both in table order.
std::vector<RepeatStats> depth_sweep(const std::vector<Variant>& variants,
                                     const std::vector<unsigned>& depths,
                                     std::shared_ptr<const QualityGrid> quality,
                                     const SweepOptions& options, const RunSink& sink = {},
                                     const CellSink& on_cell = {});

}  // namespace gwvqa
