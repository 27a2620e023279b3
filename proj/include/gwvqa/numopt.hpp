#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gwvqa/error.hpp"

namespace gwvqa {

using Objective = std::function<double(std::span<const double>)>;

enum class Termination { GradientTol, MaxIter, LineSearchFail };

const char* termination_name(Termination t);

struct OptimizeReport {
  std::vector<double> x_star;
  double value = 0.0;
  double gradient_norm = 0.0;  // max-norm at x_star
  unsigned iterations = 0;
  std::size_t objective_evals = 0;
  bool converged = false;
  Termination termination = Termination::MaxIter;
};

/// Thrown when the objective turns non-finite mid-search; carries the best
/// iterate reached so far.
class OptimizeError : public Error {
 public:
  OptimizeError(const std::string& what, OptimizeReport partial)
      : Error(ErrorCode::EvaluationError, what), partial_(std::move(partial)) {}
  const OptimizeReport& partial() const { return partial_; }

 private:
  OptimizeReport partial_;
};

struct BfgsOptions {
  double gtol = 1e-3;
  unsigned max_iter = 200;
  double step_scale = 1.49e-8;
  double c1 = 1e-4;
  double c2 = 0.9;
  unsigned max_line_search = 20;
};

// Forward differences with h_i = step_scale * max(1, |x_i|). `fx` may carry f(x)
// when already known.
std::vector<double> finite_diff_gradient(const Objective& f, std::span<const double> x,
                                         double step_scale = 1.49e-8,
                                         const double* fx = nullptr);

// Maximizes f via BFGS on -f with a strong-Wolfe line search.
OptimizeReport bfgs_maximize(const Objective& f, std::vector<double> x0,
                             const BfgsOptions& options = {});

}  // namespace gwvqa
