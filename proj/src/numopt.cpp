#include "gwvqa/numopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace gwvqa {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::GradientTol: return "gradient_tol";
    case Termination::MaxIter: return "max_iter";
    case Termination::LineSearchFail: return "line_search_fail";
  }
  return "?";
}

std::vector<double> finite_diff_gradient(const Objective& f, std::span<const double> x,
                                         double step_scale, const double* fx) {
  const double f0 = fx ? *fx : f(x);
  if (!std::isfinite(f0)) fail(ErrorCode::EvaluationError, "objective is not finite");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = step_scale * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fi = f(probe);
    if (!std::isfinite(fi)) fail(ErrorCode::EvaluationError, "objective is not finite");
    g[i] = (fi - f0) / (probe[i] - x[i]);
    probe[i] = x[i];
  }
  return g;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Minimization state: phi = -f, grad = -grad f.
struct Point {
  std::vector<double> x;
  double phi = 0.0;
  std::vector<double> grad;
};

class Minimizer {
 public:
  Minimizer(const Objective& f, const BfgsOptions& opt) : f_(f), opt_(opt) {}

  std::size_t evals() const { return evals_; }

  double phi(std::span<const double> x) {
    ++evals_;
    const double v = f_(x);
    if (!std::isfinite(v)) throw NonFinite{};
    return -v;
  }

  std::vector<double> grad(std::span<const double> x, double phi_x) {
    const Objective counted = [this](std::span<const double> y) {
      ++evals_;
      return f_(y);
    };
    const double fx = -phi_x;
    std::vector<double> g;
    try {
      g = finite_diff_gradient(counted, x, opt_.step_scale, &fx);
    } catch (const Error&) {
      throw NonFinite{};
    }
    for (auto& v : g) v = -v;
    return g;
  }

  struct NonFinite {};

  // Strong-Wolfe search along `dir` from `start`. Returns the accepted point, or
  // nullopt when no acceptable step was found (best seen point in `best`).
  std::optional<Point> line_search(const Point& start, const std::vector<double>& dir,
                                   double alpha1, Point& best) {
    const double phi0 = start.phi;
    const double dphi0 = dot(start.grad, dir);
    auto at = [&](double alpha) {
      std::vector<double> x(start.x.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = start.x[i] + alpha * dir[i];
      return x;
    };
    auto track = [&](const Point& p) {
      if (p.phi < best.phi) best = p;
    };

    struct Trial {
      double alpha, phi, dphi;
      Point point;
    };
    Trial lo{0.0, phi0, dphi0, start};
    double alpha = alpha1;
    double prev_phi = phi0;

    auto zoom = [&](Trial low, double hi_alpha, double hi_phi) -> std::optional<Point> {
      for (unsigned it = 0; it < opt_.max_line_search; ++it) {
        const double span = hi_alpha - low.alpha;
        double a;
        const double denom = 2.0 * (hi_phi - low.phi - low.dphi * span);
        if (denom > 0.0) {
          a = low.alpha - low.dphi * span * span / denom;
        } else {
          a = low.alpha + 0.5 * span;
        }
        const double a_min = std::min(low.alpha, hi_alpha) + 0.1 * std::abs(span);
        const double a_max = std::max(low.alpha, hi_alpha) - 0.1 * std::abs(span);
        if (!(a >= a_min && a <= a_max)) a = low.alpha + 0.5 * span;
        if (std::abs(span) < 1e-16 * std::max(1.0, std::abs(low.alpha))) return std::nullopt;

        Point p;
        p.x = at(a);
        p.phi = phi(p.x);
        if (p.phi > phi0 + opt_.c1 * a * dphi0 || p.phi >= low.phi) {
          hi_alpha = a;
          hi_phi = p.phi;
          continue;
        }
        p.grad = grad(p.x, p.phi);
        track(p);
        const double dp = dot(p.grad, dir);
        if (std::abs(dp) <= -opt_.c2 * dphi0) return p;
        if (dp * (hi_alpha - low.alpha) >= 0.0) {
          hi_alpha = low.alpha;
          hi_phi = low.phi;
        }
        low = Trial{a, p.phi, dp, std::move(p)};
      }
      return std::nullopt;
    };

    for (unsigned it = 0; it < opt_.max_line_search; ++it) {
      Point p;
      p.x = at(alpha);
      p.phi = phi(p.x);
      if (p.phi > phi0 + opt_.c1 * alpha * dphi0 || (it > 0 && p.phi >= prev_phi))
        return zoom(lo, alpha, p.phi);
      p.grad = grad(p.x, p.phi);
      track(p);
      const double dp = dot(p.grad, dir);
      if (std::abs(dp) <= -opt_.c2 * dphi0) return p;
      if (dp >= 0.0) {
        const double a = alpha;
        const double ph = p.phi;
        Trial hi_trial{a, ph, dp, std::move(p)};
        // Zoom between the current point (as low end) and the previous one.
        return zoom(hi_trial, lo.alpha, lo.phi);
      }
      prev_phi = p.phi;
      lo = Trial{alpha, p.phi, dp, std::move(p)};
      alpha *= 2.0;
    }
    return std::nullopt;
  }

 private:
  const Objective& f_;
  const BfgsOptions& opt_;
  std::size_t evals_ = 0;
};

}  // namespace

OptimizeReport bfgs_maximize(const Objective& f, std::vector<double> x0,
                             const BfgsOptions& opt) {
  require(opt.gtol > 0.0, ErrorCode::InvalidArgument, "gradient tolerance must be positive");
  const std::size_t n = x0.size();
  Minimizer m(f, opt);
  OptimizeReport report;

  Point cur;
  cur.x = std::move(x0);
  auto finish = [&](Termination why) {
    report.x_star = cur.x;
    report.value = -cur.phi;
    report.gradient_norm = max_norm(cur.grad);
    report.objective_evals = m.evals();
    report.termination = why;
    report.converged = report.gradient_norm <= opt.gtol;
    return report;
  };

  try {
    cur.phi = m.phi(cur.x);
    cur.grad = m.grad(cur.x, cur.phi);
  } catch (const Minimizer::NonFinite&) {
    report.x_star = cur.x;
    report.value = std::numeric_limits<double>::quiet_NaN();
    report.objective_evals = m.evals();
    throw OptimizeError("objective not finite at the starting point", report);
  }

  // Inverse Hessian approximation, row-major.
  std::vector<double> H(n * n, 0.0);
  auto reset_h = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
  };
  reset_h();
  double prev_phi = cur.phi + std::sqrt(dot(cur.grad, cur.grad)) / 2.0;

  try {
    while (true) {
      ++report.iterations;
      if (max_norm(cur.grad) <= opt.gtol) return finish(Termination::GradientTol);
      if (report.iterations > opt.max_iter) {
        report.iterations = opt.max_iter;
        return finish(Termination::MaxIter);
      }

      std::vector<double> dir(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dir[i] -= H[i * n + j] * cur.grad[j];
      double slope = dot(cur.grad, dir);
      if (!(slope < 0.0)) {
        reset_h();
        for (std::size_t i = 0; i < n; ++i) dir[i] = -cur.grad[i];
        slope = dot(cur.grad, dir);
      }

      double alpha1 = 1.0;
      const double guess = 1.01 * 2.0 * (cur.phi - prev_phi) / slope;
      if (std::isfinite(guess) && guess > 0.0) alpha1 = std::min(1.0, guess);

      Point best = cur;
      auto next = m.line_search(cur, dir, alpha1, best);
      if (!next) {
        if (best.phi < cur.phi) cur = std::move(best);
        return finish(Termination::LineSearchFail);
      }

      std::vector<double> s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = next->x[i] - cur.x[i];
        y[i] = next->grad[i] - cur.grad[i];
      }
      prev_phi = cur.phi;
      cur = std::move(*next);

      const double ys = dot(y, s);
      if (ys > 0.0 && std::isfinite(ys)) {
        const double rho = 1.0 / ys;
        // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
        std::vector<double> Hy(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
        const double yHy = dot(y, Hy);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            H[i * n + j] += -rho * (Hy[i] * s[j] + s[i] * Hy[j]) +
                            (rho * rho * yHy + rho) * s[i] * s[j];
      }
    }
  } catch (const Minimizer::NonFinite&) {
    report.x_star = cur.x;
    report.value = -cur.phi;
    report.gradient_norm = max_norm(cur.grad);
    report.objective_evals = m.evals();
    report.termination = Termination::LineSearchFail;
    throw OptimizeError("objective became non-finite during the search", report);
  }
}

}  // namespace gwvqa
