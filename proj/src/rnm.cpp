#include "risradar/uqp.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>

namespace risradar {

void RnmConfig::validate() const {
  if (!(tol_f > 0.0)) {
    throw ConfigError("RNM tolerance must be positive");
  }
  if (max_iter < 1) {
    throw ConfigError("RNM max_iter must be positive");
  }
  if (!(mu_margin > 0.0)) {
    throw ConfigError("RNM mu margin must be positive");
  }
}

std::string InnerSolveTrace::toCsv(bool with_millis) const {
  std::ostringstream out;
  out << "iteration,f,mu,grad_norm" << (with_millis ? ",millis\n" : "\n");
  out << std::setprecision(12);
  // row r > 0 describes the step that produced f[r]
  for (std::size_t r = 0; r < f.size(); ++r) {
    const bool step = r > 0 && r - 1 < mu.size();
    out << r << ',' << f[r] << ',' << (step ? mu[r - 1] : 0.0) << ','
        << (step ? grad_norm[r - 1] : 0.0);
    if (with_millis) {
      out << ',' << (step ? millis[r - 1] : 0.0);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

using Clock = std::chrono::steady_clock;

struct Accepted {
  CcmPoint next;
  double f_next = 0.0;
  double mu = 0.0;
  double ambient = 0.0;
  double retraction = 0.0;
};

[[noreturn]] void riseError(int r, double f, double f_next, int doublings) {
  std::ostringstream msg;
  msg << "RNM iteration " << r << ": f rose from " << f << " to " << f_next
      << " after " << doublings << " doublings of mu";
  throw MonotonicityViolation(msg.str());
}

// Every step uses the loading anchored above lambda1.
Accepted certifiedStep(const UqpProblem &p, const CcmPoint &point, double f,
                       int r, const RnmConfig &cfg, InnerSolveTrace &trace) {
  const CVec &v = point.vec();
  NewtonDirection dir = improvedNewtonDirection(p, v, cfg.mu_margin);
  if (dir.dense_lambda1) {
    ++trace.dense_fallbacks;
  }
  for (int retry = 0;; ++retry) {
    Accepted out;
    out.next = retract(point, dir.xi);
    out.ambient = p.objectiveDifference(v + dir.xi, v);
    out.retraction = p.objectiveDifference(out.next.vec(), v + dir.xi);
    out.f_next = p.reducedObjective(out.next.vec());
    out.mu = dir.mu;
    if (out.f_next <= f + monotoneSlack(f)) {
      ++trace.certified_steps;
      return out;
    }
    if (retry >= 10) {
      riseError(r, f, out.f_next, retry);
    }
    dir.mu *= 2.0;
    const auto c = loadedNewtonStep(tangentModel(p, v, false), dir.mu);
    if (!c) {
      throw NumericalError("Newton system lost positive definiteness");
    }
    dir.xi = fromTangentCoordinates(v, *c);
  }
}

// Loading adjusted by the ratio of actual to model decrease, capped by the
// certified loading.
Accepted adaptiveStep(const UqpProblem &p, const CcmPoint &point, double f,
                      int r, const RnmConfig &cfg, double &mu,
                      InnerSolveTrace &trace) {
  const CVec &v = point.vec();
  TangentModel model = tangentModel(p, v, false);
  const double scale =
      std::max(model.hessian.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  const double floor = 1e-12 * scale + 1e-10;
  if (mu < 0.0) {
    mu = 1e-4 * scale;
  }

  std::optional<Loading> cert;
  int doublings = 0;
  for (;;) {
    const bool at_cert = cert && mu >= cert->mu;
    if (at_cert && doublings == 0) {
      mu = cert->mu;
    }
    const auto c = loadedNewtonStep(model, mu);
    if (!c) {
      if (at_cert) {
        if (++doublings > 10) {
          throw NumericalError(
              "Newton system is not positive definite after 10 doublings of mu");
        }
        mu *= 2.0;
      } else {
        mu = std::max(4.0 * mu, 1e-6 * scale);
      }
      continue;
    }

    const CVec xi = fromTangentCoordinates(v, *c);
    const double predicted =
        -(model.gradient.dot(*c) + 0.5 * c->dot(model.hessian * *c));
    Accepted out;
    bool valid = true;
    try {
      out.next = retract(point, xi);
    } catch (const ZeroElementError &) {
      valid = false;
    }
    if (valid) {
      out.f_next = p.reducedObjective(out.next.vec());
      out.mu = mu;
      const double actual = f - out.f_next;
      const bool monotone = out.f_next <= f + monotoneSlack(f);
      const bool tiny = predicted <= 1e-14 * std::max(1.0, std::abs(f));
      if (actual >= 1e-4 * predicted || (monotone && (at_cert || tiny))) {
        out.ambient = p.objectiveDifference(v + xi, v);
        out.retraction = p.objectiveDifference(out.next.vec(), v + xi);
        if (at_cert) {
          ++trace.certified_steps;
        }
        const double rho = predicted > 0.0 ? actual / predicted : 0.0;
        if (rho > 0.75) {
          mu = std::max(0.25 * mu, floor);
        } else if (rho < 0.25) {
          mu *= 2.0;
        }
        return out;
      }
    }

    ++trace.rejected_steps;
    if (!cert) {
      model.bound = tangentModel(p, v).bound;
      cert = certifiedLoading(model, cfg.mu_margin);
      if (cert->dense) {
        ++trace.dense_fallbacks;
      }
    }
    if (at_cert) {
      if (++doublings > 10) {
        riseError(r, f, out.f_next, doublings - 1);
      }
      mu *= 2.0;
    } else {
      mu = std::min(4.0 * mu, cert->mu);
    }
  }
}

} // namespace

std::string toString(MuPolicy p) {
  return p == MuPolicy::Adaptive ? "adaptive" : "certified";
}

MuPolicy parseMuPolicy(const std::string &name) {
  if (name == "adaptive") {
    return MuPolicy::Adaptive;
  }
  if (name == "certified") {
    return MuPolicy::Certified;
  }
  throw ConfigError("unknown mu policy '" + name +
                    "' (expected adaptive, certified)");
}

UqpSolution rnmSolve(const UqpProblem &p, const CcmPoint &v0,
                     const RnmConfig &cfg) {
  cfg.validate();
  if (v0.size() != p.size()) {
    throw DimensionError("rnmSolve: initial point has the wrong size");
  }

  UqpSolution sol{v0, {}};
  InnerSolveTrace &trace = sol.trace;
  double f = p.reducedObjective(sol.v.vec());
  trace.f.push_back(f);
  double mu = -1.0;

  for (int r = 0; r < cfg.max_iter; ++r) {
    const auto start = Clock::now();
    const double gnorm = riemannianGradient(p, sol.v.vec()).norm();
    if (gnorm == 0.0) {
      trace.converged = true;
      break;
    }

    Accepted step = cfg.mu_policy == MuPolicy::Certified
                        ? certifiedStep(p, sol.v, f, r, cfg, trace)
                        : adaptiveStep(p, sol.v, f, r, cfg, mu, trace);

    const double change = step.f_next - f;
    sol.v = std::move(step.next);
    f = step.f_next;
    ++trace.iterations;
    trace.f.push_back(f);
    trace.mu.push_back(step.mu);
    trace.grad_norm.push_back(gnorm);
    trace.ambient_change.push_back(step.ambient);
    trace.retraction_change.push_back(step.retraction);
    trace.millis.push_back(
        std::chrono::duration<double, std::milli>(Clock::now() - start)
            .count());
    if (std::abs(change) < cfg.tol_f) {
      trace.converged = true;
      break;
    }
  }
  return sol;
}

std::string toString(UqpSolver s) {
  switch (s) {
  case UqpSolver::Rnm:
    return "rnm";
  case UqpSolver::Rcg:
    return "rcg";
  case UqpSolver::Rgd:
    return "rgd";
  }
  return "unknown";
}

UqpSolver parseSolver(const std::string &name) {
  if (name == "rnm") {
    return UqpSolver::Rnm;
  }
  if (name == "rcg") {
    return UqpSolver::Rcg;
  }
  if (name == "rgd") {
    return UqpSolver::Rgd;
  }
  throw ConfigError("unknown solver '" + name + "' (expected rnm, rcg, rgd)");
}

UqpSolution solveUqp(UqpSolver solver, const UqpProblem &p,
                     const CcmPoint &v0, const RnmConfig &cfg) {
  switch (solver) {
  case UqpSolver::Rnm:
    return rnmSolve(p, v0, cfg);
  case UqpSolver::Rcg:
    return rcgSolve(p, v0, cfg);
  case UqpSolver::Rgd:
    return rgdSolve(p, v0, cfg);
  }
  throw ConfigError("unknown solver");
}

} // namespace risradar
