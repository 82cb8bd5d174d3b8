#include "risradar/codesign.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "risradar/rng.hpp"

namespace risradar {

namespace {

using Clock = std::chrono::steady_clock;

double elapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Phi(theta) u = r(theta) (a^T(theta) u)
CVec phiTimes(const Scene &scene, const ChannelMatrix &g, const CVec &v,
              const CVec &u, double angle) {
  const CVec r = compositeResponse(scene, g, v, angle);
  const Complex tx = steeringRadar(scene.geometry, angle).transpose() * u;
  return r * tx;
}

// Phi^H(theta) w = conj(a(theta)) (r^H w)
CVec phiAdjointTimes(const Scene &scene, const ChannelMatrix &g, const CVec &v,
                     const CVec &w, double angle) {
  const CVec r = compositeResponse(scene, g, v, angle);
  const CVec a = steeringRadar(scene.geometry, angle);
  return a.conjugate() * r.dot(w);
}

CVec solveHermitian(const CMat &a, const CVec &b, const char *what) {
  Eigen::LLT<CMat> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
  }
  return llt.solve(b);
}

bool decreased(double before, double after) {
  return after < before * (1.0 - 1e-9);
}

} // namespace

void CodesignConfig::validate() const {
  if (!(delta2 > 0.0) || !(delta3 > 0.0)) {
    throw ConfigError("codesign tolerances must be positive");
  }
  if (p_max < 1 || dinkelbach_max < 1) {
    throw ConfigError("iteration caps must be positive");
  }
  rnm.validate();
}

int RisUpdateReport::totalInnerIterations() const {
  return std::accumulate(inner_iterations.begin(), inner_iterations.end(), 0);
}

RisUpdateReport optimizeRis(const Scene &scene, const ChannelMatrix &g,
                            const BeamformerState &state,
                            const CodesignConfig &cfg) {
  const auto start = Clock::now();
  const ChannelTerms terms = buildChannelTerms(scene, g, state.u, state.w);

  RisUpdateReport report;
  report.v = CcmPoint(state.v);
  double z = dinkelbachZ(terms, report.v.vec());
  report.z.push_back(z);

  for (int q = 0; q < cfg.dinkelbach_max; ++q) {
    const UqpProblem problem = buildUqp(terms, z);
    const auto inner_start = Clock::now();
    UqpSolution sol = solveUqp(cfg.solver, problem, report.v, cfg.rnm);
    report.inner_millis.push_back(elapsedMs(inner_start));
    report.inner_iterations.push_back(sol.trace.iterations);
    report.dense_fallbacks += sol.trace.dense_fallbacks;
    report.line_search_failed |= sol.trace.line_search_failed;

    const double z_next = dinkelbachZ(terms, sol.v.vec());
    if (z_next < z - 1e-10 * std::max(1.0, std::abs(z))) {
      std::ostringstream msg;
      msg << "Dinkelbach step " << q << ": z decreased from " << z << " to "
          << z_next;
      throw MonotonicityViolation(msg.str());
    }
    report.v = std::move(sol.v);
    report.z.push_back(z_next);
    const double change = std::abs(z_next - z);
    z = z_next;
    if (change < cfg.delta2) {
      report.converged = true;
      break;
    }
  }
  report.millis = elapsedMs(start);
  return report;
}

CVec updateReceive(const Scene &scene, const ChannelMatrix &g,
                   const BeamformerState &state) {
  const int n = scene.geometry.n_radar;
  CMat cov = CMat::Identity(n, n) * scene.noise_power;
  for (const auto &itf : scene.interferences) {
    const CVec x = phiTimes(scene, g, state.v, state.u, itf.angle_deg);
    cov.noalias() += itf.power * x * x.adjoint();
  }
  const CVec target =
      phiTimes(scene, g, state.v, state.u, scene.target_angle_deg);
  return solveHermitian(cov, target, "receive update");
}

CVec updateTransmit(const Scene &scene, const ChannelMatrix &g,
                    const BeamformerState &state) {
  const int n = scene.geometry.n_radar;
  const double w_energy = state.w.squaredNorm();
  if (w_energy == 0.0) {
    throw NumericalError("transmit update: receive beamformer is zero");
  }
  CMat cov = CMat::Identity(n, n) * (scene.noise_power * w_energy);
  for (const auto &itf : scene.interferences) {
    const CVec y = phiAdjointTimes(scene, g, state.v, state.w, itf.angle_deg);
    cov.noalias() += itf.power * y * y.adjoint();
  }
  const CVec target =
      phiAdjointTimes(scene, g, state.v, state.w, scene.target_angle_deg);
  CVec u = solveHermitian(cov, target, "transmit update");
  const double norm = u.norm();
  if (norm == 0.0) {
    throw NumericalError("transmit update produced a zero beamformer");
  }
  return u / norm;
}

double transmitQuotient(const Scene &scene, const ChannelMatrix &g,
                        const BeamformerState &state) {
  const CVec target =
      phiAdjointTimes(scene, g, state.v, state.w, scene.target_angle_deg);
  double denom =
      scene.noise_power * state.w.squaredNorm() * state.u.squaredNorm();
  for (const auto &itf : scene.interferences) {
    const CVec y = phiAdjointTimes(scene, g, state.v, state.w, itf.angle_deg);
    denom += itf.power * std::norm(y.dot(state.u));
  }
  return std::norm(target.dot(state.u)) / denom;
}

CcmPoint randomPhases(int m, std::uint64_t seed) {
  CounterRng rng(seed, 0x52524953ULL);
  CVec v(m);
  for (int k = 0; k < m; ++k) {
    v[k] = std::polar(1.0, rng.phase());
  }
  return CcmPoint::normalize(v);
}

BeamformerState initialState(const Scene &scene, const ChannelMatrix &g,
                             const CodesignConfig &cfg) {
  const int n = scene.geometry.n_radar;
  const int m = scene.geometry.m_ris;
  BeamformerState state;
  state.u = steeringRadar(scene.geometry, scene.target_angle_deg).conjugate() /
            std::sqrt(static_cast<double>(n));
  if (cfg.init == InitPolicy::Random && m > 0) {
    state.v = randomPhases(m, cfg.init_seed).vec();
  } else {
    state.v = CVec::Ones(m);
  }
  state.w = updateReceive(scene, g, state);
  return state;
}

namespace {

SolveReport alternate(const Scene &scene, const ChannelMatrix &g,
                      const CodesignConfig &cfg, BeamformerState state,
                      bool optimize_v, std::string mode) {
  scene.validate();
  cfg.validate();
  SolveReport report;
  report.mode = std::move(mode);
  report.solver = cfg.solver;

  double objective = codesignObjective(scene, g, state);
  report.initial_objective = objective;
  report.initial_sinr_db = linearToDb(scene.target_power * objective);

  // Accepts a candidate unless it lowers G beyond the slack.
  auto accept = [&](BeamformerState cand, const char *what, int p) {
    const double next = codesignObjective(scene, g, cand);
    if (decreased(objective, next)) {
      std::ostringstream msg;
      msg << "iteration " << p << ": " << what << " update lowered G from "
          << objective << " to " << next << "; step rejected";
      report.diagnostics.push_back(msg.str());
      return;
    }
    state = std::move(cand);
    objective = next;
  };

  for (int p = 0; p < cfg.p_max; ++p) {
    OuterIteration it;
    const double before = objective;

    if (optimize_v && scene.hasRis()) {
      const auto start = Clock::now();
      try {
        it.ris = optimizeRis(scene, g, state, cfg);
      } catch (const Error &e) {
        std::ostringstream msg;
        msg << "outer iteration " << p << ", RIS update: " << e.what();
        throw MonotonicityViolation(msg.str());
      }
      it.ris_updated = true;
      BeamformerState cand = state;
      cand.v = it.ris.v.vec();
      accept(std::move(cand), "RIS", p);
      it.millis_v = elapsedMs(start);
    }
    it.objective_after_v = objective;

    {
      const auto start = Clock::now();
      BeamformerState cand = state;
      cand.w = updateReceive(scene, g, cand);
      accept(std::move(cand), "receive", p);
      it.millis_w = elapsedMs(start);
    }
    it.objective_after_w = objective;

    {
      const auto start = Clock::now();
      BeamformerState cand = state;
      cand.u = updateTransmit(scene, g, cand);
      accept(std::move(cand), "transmit", p);
      it.millis_u = elapsedMs(start);
    }
    it.objective_after_u = objective;
    it.sinr_db = linearToDb(scene.target_power * objective);
    report.iterations.push_back(std::move(it));

    if (std::abs(objective - before) < cfg.delta3 * before) {
      report.converged = true;
      break;
    }
  }
  report.state = std::move(state);
  return report;
}

} // namespace

SolveReport codesign(const Scene &scene, const ChannelMatrix &g,
                     const CodesignConfig &cfg) {
  return alternate(scene, g, cfg, initialState(scene, g, cfg), true,
                   scene.hasRis() ? "ris" : "free");
}

SolveReport codesignRandomRis(const Scene &scene, const ChannelMatrix &g,
                              const CodesignConfig &cfg, std::uint64_t seed) {
  CodesignConfig frozen = cfg;
  frozen.init = InitPolicy::Random;
  frozen.init_seed = seed;
  return alternate(scene, g, frozen, initialState(scene, g, frozen), false,
                   "rris");
}

SolveReport codesignRisFree(const Scene &scene, const CodesignConfig &cfg) {
  Scene free = scene;
  free.geometry.m_ris = 0;
  ChannelMatrix none;
  none.g.resize(0, scene.geometry.n_radar);
  CodesignConfig plain = cfg;
  plain.init = InitPolicy::Matched;
  return alternate(free, none, plain, initialState(free, none, plain), false,
                   "free");
}

std::vector<double> SolveReport::objectiveSequence() const {
  std::vector<double> seq{initial_objective};
  for (const auto &it : iterations) {
    seq.push_back(it.objective_after_v);
    seq.push_back(it.objective_after_w);
    seq.push_back(it.objective_after_u);
  }
  return seq;
}

std::string SolveReport::toCsv() const {
  std::ostringstream out;
  out << "iteration,objective_after_v,objective_after_w,objective_after_u,"
         "sinr_db,dinkelbach_steps,inner_iterations,final_z\n";
  out << std::setprecision(12);
  for (std::size_t p = 0; p < iterations.size(); ++p) {
    const auto &it = iterations[p];
    const int steps =
        it.ris_updated ? static_cast<int>(it.ris.inner_iterations.size()) : 0;
    const double z = it.ris.z.empty() ? 0.0 : it.ris.z.back();
    out << p + 1 << ',' << it.objective_after_v << ',' << it.objective_after_w
        << ',' << it.objective_after_u << ',' << it.sinr_db << ',' << steps
        << ',' << it.ris.totalInnerIterations() << ',' << z << '\n';
  }
  return out.str();
}

std::string SolveReport::timingCsv() const {
  std::ostringstream out;
  out << "iteration,millis_v,millis_w,millis_u\n";
  out << std::setprecision(6);
  for (std::size_t p = 0; p < iterations.size(); ++p) {
    const auto &it = iterations[p];
    out << p + 1 << ',' << it.millis_v << ',' << it.millis_w << ','
        << it.millis_u << '\n';
  }
  return out.str();
}

std::string SolveReport::summaryJson() const {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["solver"] = toString(solver);
  j["initial_sinr_db"] = initial_sinr_db;
  j["final_sinr_db"] = finalSinrDb();
  j["iterations"] = iterations.size();
  j["converged"] = converged;
  j["diagnostics"] = diagnostics;
  return j.dump(2) + "\n";
}

} // namespace risradar
