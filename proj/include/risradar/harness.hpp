#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "risradar/codesign.hpp"

namespace risradar {

enum class SweepVariable { Inr, InterferenceCount, Distance, RisElements,
                           RadarElements };
enum class Mode { Ris, RandomRis, Free };

std::string toString(SweepVariable v);
SweepVariable parseSweepVariable(const std::string &name);
std::string toString(Mode m);
Mode parseMode(const std::string &name);

struct ExperimentSpec {
  Scene scene = defaultScene();
  SweepVariable variable = SweepVariable::RisElements;
  std::vector<double> values;
  int trials = 1;
  std::uint64_t base_seed = 0;
  CodesignConfig codesign;
  std::vector<Mode> modes{Mode::Ris};
  int threads = 1;

  void validate() const;
};

/// Scene with the sweep variable set to `value`. INR applies to every
/// interferer; an interference count selects the first reference angles at
/// the INR of the template's first interferer (30 dB when it has none).
Scene applySweep(const Scene &scene, SweepVariable variable, double value);

/// Channel seed of trial t: base xor t.
inline std::uint64_t trialSeed(std::uint64_t base, int trial) {
  return base ^ static_cast<std::uint64_t>(trial);
}

/// Runs one mode on a fixed channel. Random-RIS phases are drawn from `seed`.
SolveReport runMode(const Scene &scene, const ChannelMatrix &g, Mode mode,
                    const CodesignConfig &cfg, std::uint64_t seed);

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double sinr = 0.0; ///< linear
  int iterations = 0;
  double millis = 0.0;
  std::string summary_json;
  std::string report_csv;
};

struct ResultRow {
  double value = 0.0;
  Mode mode = Mode::Ris;
  std::vector<TrialResult> runs; ///< sorted by trial index
  int failures = 0;
  double mean_sinr = 0.0;    ///< linear average over successful trials
  double mean_sinr_db = 0.0; ///< 10 log10(mean_sinr)
  double std_sinr_db = 0.0;  ///< sample deviation of per-trial dB values
  double mean_iterations = 0.0;
  double mean_millis = 0.0;
};

struct ResultTable {
  SweepVariable variable = SweepVariable::RisElements;
  std::vector<ResultRow> rows; ///< value-major, modes in spec order

  int failures() const;
  const ResultRow &row(double value, Mode mode) const;
  /// Deterministic columns only.
  std::string toCsv() const;
  std::string timingCsv() const;
};

ResultTable runExperiment(const ExperimentSpec &spec);

struct SolverTrace {
  UqpSolver solver = UqpSolver::Rnm;
  InnerSolveTrace first_subproblem;
  std::vector<int> update_iterations; ///< inner iterations per v-update
  std::vector<double> update_millis;
  SolveReport report;
};

/// Full codesign with each solver from the same initialization. RGD and RCG
/// run with max_iter raised to `baseline_max_iter`.
std::vector<SolverTrace>
runConvergenceComparison(const Scene &scene, const ChannelMatrix &g,
                         const std::vector<UqpSolver> &solvers,
                         const CodesignConfig &cfg,
                         int baseline_max_iter = 20000);

std::string comparisonCsv(const std::vector<SolverTrace> &traces);
std::string comparisonTimingCsv(const std::vector<SolverTrace> &traces);

struct OracleResult {
  CVec v;
  double f = 0.0; ///< full objective including lambda_v M
  std::vector<int> phase_index;
};

/// Exhaustive minimum of the UQP objective over v_m = exp(j 2 pi k / phases).
/// The enumeration budget is phases^M <= 2^20.
OracleResult runOracle(const UqpProblem &problem, int phases);

/// Largest |f(neighbor) - f(best)| over grid points that differ from the
/// minimizer by one phase step in one element.
double quantizationSlack(const UqpProblem &problem, const OracleResult &best,
                         int phases);

/// [-90, 90] deg in 0.1 deg steps.
std::vector<double> defaultBeampatternGrid();

/// Beampattern normalized so that its peak is 0 dB.
std::vector<std::pair<double, double>>
normalizedBeampattern(const Scene &scene, const ChannelMatrix &g,
                      const BeamformerState &state,
                      const std::vector<double> &grid_deg);

std::string beampatternCsv(const std::vector<std::pair<double, double>> &rows);

void emitBeampattern(const Scene &scene, const ChannelMatrix &g,
                     const BeamformerState &state,
                     const std::vector<double> &grid_deg,
                     const std::string &path);

/// Writes `text` to `path`, throwing Error with the path on failure.
void writeFile(const std::string &path, const std::string &text);

} // namespace risradar
