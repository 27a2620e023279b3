#include "gwvqa/vqa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "gwvqa/error.hpp"
#include "gwvqa/parallel.hpp"

namespace gwvqa {

using std::numbers::pi;

Variant parse_variant(const std::string& name) {
  if (name == "qaoa-hypercube") return Variant::QaoaHypercube;
  if (name == "qaoa-complete") return Variant::QaoaComplete;
  if (name == "qmoa-complete") return Variant::QmoaComplete;
  if (name == "qmoa-cycle") return Variant::QmoaCycle;
  if (name == "rdgs") return Variant::Rdgs;
  fail(ErrorCode::ConfigError, "unknown variant '" + name + "'");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::QaoaHypercube: return "qaoa-hypercube";
    case Variant::QaoaComplete: return "qaoa-complete";
    case Variant::QmoaComplete: return "qmoa-complete";
    case Variant::QmoaCycle: return "qmoa-cycle";
    case Variant::Rdgs: return "rdgs";
  }
  return "?";
}

MixerFamily mixer_for(Variant v) {
  switch (v) {
    case Variant::QaoaHypercube: return MixerFamily::HypercubeGlobal;
    case Variant::QaoaComplete: return MixerFamily::CompleteGlobal;
    case Variant::QmoaComplete: return MixerFamily::CompletePerDim;
    case Variant::QmoaCycle: return MixerFamily::CyclePerDim;
    case Variant::Rdgs: return MixerFamily::CompleteGlobal;
  }
  fail(ErrorCode::Internal, "unhandled variant");
}

std::size_t parameter_count(Variant v, unsigned depth) {
  switch (v) {
    case Variant::QaoaHypercube:
    case Variant::QaoaComplete: return 2u * depth;
    case Variant::QmoaComplete:
    case Variant::QmoaCycle: return 3u * depth;
    case Variant::Rdgs: return 0;
  }
  return 0;
}

namespace {

// SplitMix64 finalizer: a counter-based stream keyed by (seed, index).
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform on (0, 1].
double counter_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = mix(mix(seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

using Clock = std::chrono::steady_clock;

void fill_metrics(RunResult& r, const StateVector& s, const Landscape& land) {
  r.expectation = expectation(s, land.cost);
  r.quality_expectation = expectation(s, land.quality);
  r.success_prob = std::min(1.0, masked_probability(s, land.success_mask));
}

}  // namespace

Landscape make_landscape(const AnsatzConfig& config) {
  require(config.quality != nullptr, ErrorCode::InvalidArgument, "ansatz needs a quality grid");
  const QualityGrid& q = *config.quality;
  Landscape land;
  land.dims = config.dims();
  if (land.dims.total() != q.size())
    fail(ErrorCode::DimensionError, "quality grid size differs from its dims");
  land.quality = q.values;
  land.success_mask.resize(q.size());
  for (std::size_t j = 0; j < q.size(); ++j)
    land.success_mask[j] = q.binary ? q.values[j] == 1.0 : q.values[j] > config.rho0;
  land.marked = static_cast<std::size_t>(
      std::count(land.success_mask.begin(), land.success_mask.end(), 1));
  if (config.binary_cost || q.binary) {
    land.cost.resize(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) land.cost[j] = land.success_mask[j] ? 1.0 : 0.0;
  } else {
    land.cost = q.values;
  }
  return land;
}

StateVector evaluate_ansatz(const AnsatzConfig& config, const Landscape& land,
                            std::span<const double> params, std::size_t* oracle_calls) {
  if (config.variant == Variant::Rdgs)
    fail(ErrorCode::TypeError, "RDGS has no variational parameters; use rdgs_run");
  if (params.size() != parameter_count(config.variant, config.depth))
    fail(ErrorCode::ArityError, "parameter count does not match the ansatz");
  StateVector s = uniform_state(land.dims);
  const MixerFamily family = mixer_for(config.variant);
  const std::size_t stride = is_per_dim(family) ? 3 : 2;
  for (unsigned layer = 0; layer < config.depth; ++layer) {
    const auto block = params.subspan(layer * stride, stride);
    apply_phase(s, block[0], land.cost);
    apply_mixer(s, family, block.subspan(1));
  }
  if (oracle_calls) *oracle_calls += config.depth;
  return s;
}

StateVector evaluate_ansatz(const AnsatzConfig& config, std::span<const double> params) {
  return evaluate_ansatz(config, make_landscape(config), params);
}

std::vector<double> initial_parameters(const AnsatzConfig& config, std::uint64_t seed) {
  const MixerFamily family = mixer_for(config.variant);
  const std::size_t count = parameter_count(config.variant, config.depth);
  const std::size_t stride = is_per_dim(family) ? 3 : 2;
  const Dims dims = config.dims();
  std::vector<double> p(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t slot = i % stride;
    double upper = 0.5;
    if (slot > 0) {
      if (family == MixerFamily::CompleteGlobal)
        upper = 2.0 * pi / static_cast<double>(dims.total());
      else if (family == MixerFamily::CompletePerDim)
        upper = 2.0 * pi / static_cast<double>(slot == 1 ? dims.j1 : dims.j2);
    }
    p[i] = upper * counter_uniform(seed, i);
  }
  return p;
}

RunResult optimize_from(const AnsatzConfig& config, std::vector<double> init,
                        std::uint64_t seed, const BfgsOptions& options) {
  const auto start = Clock::now();
  const Landscape land = make_landscape(config);
  RunResult r;
  r.variant = config.variant;
  r.depth = config.depth;
  r.seed = seed;
  r.params_init = init;
  std::size_t calls = 0;
  const Objective objective = [&](std::span<const double> params) {
    return expectation(evaluate_ansatz(config, land, params, &calls), land.cost);
  };
  try {
    r.report = bfgs_maximize(objective, std::move(init), options);
  } catch (const OptimizeError& e) {
    r.report = e.partial();
    r.failed = true;
    r.error = e.what();
  }
  r.params_star = r.report.x_star;
  r.oracle_calls = calls;
  fill_metrics(r, evaluate_ansatz(config, land, r.params_star), land);
  r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

RunResult optimize_run(const AnsatzConfig& config, std::uint64_t seed,
                       const BfgsOptions& options) {
  require(config.depth >= 1, ErrorCode::InvalidArgument, "optimization needs depth >= 1");
  return optimize_from(config, initial_parameters(config, seed), seed, options);
}

RunResult rdgs_run(const AnsatzConfig& config) {
  const auto start = Clock::now();
  const Landscape land = make_landscape(config);
  if (land.marked == 0) fail(ErrorCode::NoMarkedStates, "no grid point exceeds the threshold");
  QualityGrid marked;
  marked.binary = true;
  marked.values.resize(land.success_mask.size());
  for (std::size_t j = 0; j < land.success_mask.size(); ++j)
    marked.values[j] = land.success_mask[j] ? 1.0 : 0.0;
  StateVector s = uniform_state(land.dims);
  grover_iterate(s, marked, config.depth);
  RunResult r;
  r.variant = Variant::Rdgs;
  r.depth = config.depth;
  r.oracle_calls = config.depth;
  r.report.converged = true;
  r.report.termination = Termination::GradientTol;
  fill_metrics(r, s, land);
  r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

RepeatStats aggregate(std::span<const RunResult> runs) {
  require(!runs.empty(), ErrorCode::InvalidArgument, "nothing to aggregate");
  RepeatStats st;
  st.variant = runs.front().variant;
  st.depth = runs.front().depth;
  st.n_repeats = runs.size();
  const double n = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    st.mean_expectation += r.expectation;
    st.mean_success += r.success_prob;
    st.mean_iters += r.report.iterations;
    st.mean_wall_s += r.wall_time;
    st.partial = st.partial || r.failed;
  }
  st.mean_expectation /= n;
  st.mean_success /= n;
  st.mean_iters /= n;
  st.mean_wall_s /= n;
  if (runs.size() > 1) {
    double ve = 0.0, vs = 0.0;
    for (const auto& r : runs) {
      ve += (r.expectation - st.mean_expectation) * (r.expectation - st.mean_expectation);
      vs += (r.success_prob - st.mean_success) * (r.success_prob - st.mean_success);
    }
    st.std_expectation = std::sqrt(ve / (n - 1.0));
    st.std_success = std::sqrt(vs / (n - 1.0));
  }
  return st;
}

RepeatStats repeat_study(const AnsatzConfig& config, unsigned n_repeats, std::uint64_t base_seed,
                         const BfgsOptions& options, unsigned workers,
                         std::vector<RunResult>* runs_out) {
  require(n_repeats >= 1, ErrorCode::InvalidArgument, "need at least one repeat");
  std::vector<RunResult> runs(n_repeats);
  parallel_for(n_repeats, workers, [&](std::size_t i) {
    runs[i] = optimize_run(config, base_seed + i, options);
  });
  RepeatStats st = aggregate(runs);
  if (runs_out) *runs_out = std::move(runs);
  return st;
}

std::vector<RepeatStats> depth_sweep(const std::vector<Variant>& variants,
                                     const std::vector<unsigned>& depths,
                                     std::shared_ptr<const QualityGrid> quality,
                                     const SweepOptions& options, const RunSink& sink,
                                     const CellSink& on_cell) {
  require(!variants.empty() && !depths.empty(), ErrorCode::InvalidArgument,
          "sweep needs variants and depths");
  std::vector<RepeatStats> table;
  for (Variant v : variants) {
    for (unsigned p : depths) {
      AnsatzConfig cfg{v, p, quality, options.binary_cost, options.rho0};
      if (v == Variant::Rdgs) {
        RunResult r = rdgs_run(cfg);
        if (sink) sink(r);
        table.push_back(aggregate(std::span<const RunResult>(&r, 1)));
        if (on_cell) on_cell(table.back());
        continue;
      }
      std::vector<RunResult> runs;
      table.push_back(repeat_study(cfg, options.n_repeats, options.base_seed, options.bfgs,
                                   options.workers, &runs));
      if (sink)
        for (const auto& r : runs) sink(r);
      if (on_cell) on_cell(table.back());
    }
  }
  return table;
}

}  // namespace gwvqa
