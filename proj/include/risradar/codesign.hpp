#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risradar/scene.hpp"
#include "risradar/uqp.hpp"

namespace risradar {

enum class InitPolicy { Matched, Random };

struct CodesignConfig {
  double delta2 = 1e-8;       ///< Dinkelbach stop on |z change|
  double delta3 = 1e-6;       ///< outer stop on relative change of G
  int p_max = 9;              ///< outer alternating iterations
  int dinkelbach_max = 100;   ///< Dinkelbach steps per RIS update
  RnmConfig rnm;              ///< inner solver settings
  UqpSolver solver = UqpSolver::Rnm;
  InitPolicy init = InitPolicy::Matched;
  std::uint64_t init_seed = 0;

  void validate() const;
};

/// Result of one RIS update (the Dinkelbach loop around the UQP solver).
struct RisUpdateReport {
  CcmPoint v;
  std::vector<double> z;             ///< z^(0), z^(1), ...
  std::vector<int> inner_iterations; ///< solver iterations per Dinkelbach step
  std::vector<double> inner_millis;
  int dense_fallbacks = 0;
  bool converged = false;
  bool line_search_failed = false;
  double millis = 0.0;

  int totalInnerIterations() const;
};

RisUpdateReport optimizeRis(const Scene &scene, const ChannelMatrix &g,
                            const BeamformerState &state,
                            const CodesignConfig &cfg);

/// w = (Psi_u + sigma_n^2 I)^{-1} Phi(theta_0) u.
CVec updateReceive(const Scene &scene, const ChannelMatrix &g,
                   const BeamformerState &state);

/// u proportional to (Psi_w + sigma_n^2 w^H w I)^{-1} Phi^H(theta_0) w, unit norm.
CVec updateTransmit(const Scene &scene, const ChannelMatrix &g,
                    const BeamformerState &state);

/// Objective of the transmit subproblem |u^H Phi^H(theta_0) w|^2 /
/// u^H (Psi_w + sigma_n^2 w^H w I) u.
double transmitQuotient(const Scene &scene, const ChannelMatrix &g,
                        const BeamformerState &state);

/// Initial state: u = conj(a(theta_0)) / sqrt(N), v = 1 (or random phases
/// under InitPolicy::Random), w = updateReceive(u, v).
BeamformerState initialState(const Scene &scene, const ChannelMatrix &g,
                             const CodesignConfig &cfg);

struct OuterIteration {
  double objective_after_v = 0.0; ///< G after the RIS update
  double objective_after_w = 0.0;
  double objective_after_u = 0.0;
  double sinr_db = 0.0; ///< after the full iteration
  RisUpdateReport ris;
  bool ris_updated = false;
  double millis_v = 0.0;
  double millis_w = 0.0;
  double millis_u = 0.0;
};

struct SolveReport {
  std::string mode; ///< "ris", "rris" or "free"
  UqpSolver solver = UqpSolver::Rnm;
  double initial_objective = 0.0;
  double initial_sinr_db = 0.0;
  std::vector<OuterIteration> iterations;
  BeamformerState state;
  bool converged = false;
  std::vector<std::string> diagnostics;

  double finalSinrDb() const {
    return iterations.empty() ? initial_sinr_db : iterations.back().sinr_db;
  }
  /// G(u, v, w) after every sub-step, starting from the initial state.
  std::vector<double> objectiveSequence() const;

  /// One row per outer iteration; timing-free so identical runs produce
  /// identical bytes.
  std::string toCsv() const;
  std::string timingCsv() const;
  std::string summaryJson() const;
};

/// Alternating v -> w -> u updates until |dG| / G < delta3 or p_max.
SolveReport codesign(const Scene &scene, const ChannelMatrix &g,
                     const CodesignConfig &cfg);

/// RIS coefficients drawn once with i.i.d. uniform phases and kept fixed;
/// only w and u alternate.
SolveReport codesignRandomRis(const Scene &scene, const ChannelMatrix &g,
                              const CodesignConfig &cfg, std::uint64_t seed);

/// Conventional radar: the scene with the RIS removed (M = 0).
SolveReport codesignRisFree(const Scene &scene, const CodesignConfig &cfg);

/// Uniform random phases of length m.
CcmPoint randomPhases(int m, std::uint64_t seed);

} // namespace risradar
