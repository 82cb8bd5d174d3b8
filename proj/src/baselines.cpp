// First-order Riemannian baselines (steepest descent and Polak-Ribiere
// conjugate gradient) with Armijo backtracking on the complex circle.

#include "risradar/uqp.hpp"

#include <chrono>
#include <cmath>
#include <optional>

namespace risradar {

namespace {

using Clock = std::chrono::steady_clock;

struct Step {
  CcmPoint v;
  double f;
  double t;
};

// First trial step: ls.initial_step, then 2 (f_prev - f) / |slope| from the
// previous decrease.
double trialStep(const LineSearchConfig &ls, double last_decrease,
                 double slope) {
  if (last_decrease > 0.0 && slope < 0.0) {
    const double t = 2.0 * last_decrease / -slope;
    if (std::isfinite(t) && t > 0.0) {
      return t;
    }
  }
  return ls.initial_step;
}

// Backtracks from t until f(R(v + t d)) <= f + c t <grad, d>.
std::optional<Step> armijo(const UqpProblem &p, const CcmPoint &v, double f,
                           const CVec &dir, double slope, double t,
                           const LineSearchConfig &ls) {
  for (int k = 0; k <= ls.max_backtracks; ++k, t *= ls.shrink) {
    try {
      CcmPoint cand = retract(v, t * dir);
      const double fc = p.reducedObjective(cand.vec());
      if (fc <= f + ls.sufficient_decrease * t * slope) {
        return Step{std::move(cand), fc, t};
      }
    } catch (const ZeroElementError &) {
      // step landed on the origin for some element; shrink and retry
    }
  }
  return std::nullopt;
}

void record(InnerSolveTrace &trace, double f, double t, double gnorm,
            Clock::time_point start) {
  ++trace.iterations;
  trace.f.push_back(f);
  trace.mu.push_back(t);
  trace.grad_norm.push_back(gnorm);
  trace.millis.push_back(
      std::chrono::duration<double, std::milli>(Clock::now() - start).count());
}

} // namespace

UqpSolution rgdSolve(const UqpProblem &p, const CcmPoint &v0,
                     const RnmConfig &cfg, const LineSearchConfig &ls) {
  cfg.validate();
  UqpSolution sol{v0, {}};
  InnerSolveTrace &trace = sol.trace;
  double f = p.reducedObjective(sol.v.vec());
  trace.f.push_back(f);
  double last_decrease = 0.0;

  for (int r = 0; r < cfg.max_iter; ++r) {
    const auto start = Clock::now();
    const CVec grad = riemannianGradient(p, sol.v.vec());
    const double g2 = grad.squaredNorm();
    if (g2 == 0.0) {
      trace.converged = true;
      break;
    }
    auto step =
        armijo(p, sol.v, f, -grad, -g2, trialStep(ls, last_decrease, -g2), ls);
    if (!step) {
      trace.line_search_failed = true;
      break;
    }
    const double change = step->f - f;
    last_decrease = -change;
    sol.v = std::move(step->v);
    f = step->f;
    record(trace, f, step->t, std::sqrt(g2), start);
    if (std::abs(change) < cfg.tol_f) {
      trace.converged = true;
      break;
    }
  }
  return sol;
}

UqpSolution rcgSolve(const UqpProblem &p, const CcmPoint &v0,
                     const RnmConfig &cfg, const LineSearchConfig &ls) {
  cfg.validate();
  UqpSolution sol{v0, {}};
  InnerSolveTrace &trace = sol.trace;
  double f = p.reducedObjective(sol.v.vec());
  trace.f.push_back(f);

  CVec grad = riemannianGradient(p, sol.v.vec());
  CVec dir = -grad;
  double last_decrease = 0.0;
  for (int r = 0; r < cfg.max_iter; ++r) {
    const auto start = Clock::now();
    const double g2 = grad.squaredNorm();
    if (g2 == 0.0) {
      trace.converged = true;
      break;
    }
    double slope = realInner(grad, dir);
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -g2;
    }
    auto step =
        armijo(p, sol.v, f, dir, slope, trialStep(ls, last_decrease, slope), ls);
    if (!step) {
      trace.line_search_failed = true;
      break;
    }
    const double change = step->f - f;
    last_decrease = -change;
    sol.v = std::move(step->v);
    f = step->f;

    // projection-based vector transport to the new tangent space
    const CVec &v = sol.v.vec();
    const CVec new_grad = riemannianGradient(p, v);
    const CVec old_grad = projectTangent(v, grad);
    const CVec old_dir = projectTangent(v, dir);
    const double beta =
        std::max(0.0, realInner(new_grad, new_grad - old_grad) / g2);
    dir = -new_grad + beta * old_dir;
    record(trace, f, step->t, std::sqrt(g2), start);
    grad = new_grad;
    if (std::abs(change) < cfg.tol_f) {
      trace.converged = true;
      break;
    }
  }
  return sol;
}

} // namespace risradar
