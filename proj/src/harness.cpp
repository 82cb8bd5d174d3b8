#include "risradar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace risradar {

namespace {

using Clock = std::chrono::steady_clock;

double elapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::string formatNumber(double x) {
  std::ostringstream out;
  out << std::setprecision(10) << x;
  return out.str();
}

} // namespace

std::string toString(SweepVariable v) {
  switch (v) {
  case SweepVariable::Inr:
    return "inr_db";
  case SweepVariable::InterferenceCount:
    return "interference_count";
  case SweepVariable::Distance:
    return "distance";
  case SweepVariable::RisElements:
    return "m_ris";
  case SweepVariable::RadarElements:
    return "n_radar";
  }
  return "unknown";
}

SweepVariable parseSweepVariable(const std::string &name) {
  for (auto v : {SweepVariable::Inr, SweepVariable::InterferenceCount,
                 SweepVariable::Distance, SweepVariable::RisElements,
                 SweepVariable::RadarElements}) {
    if (toString(v) == name) {
      return v;
    }
  }
  throw ConfigError("unknown sweep variable '" + name +
                    "' (expected inr_db, interference_count, distance, "
                    "m_ris, n_radar)");
}

std::string toString(Mode m) {
  switch (m) {
  case Mode::Ris:
    return "ris";
  case Mode::RandomRis:
    return "rris";
  case Mode::Free:
    return "free";
  }
  return "unknown";
}

Mode parseMode(const std::string &name) {
  if (name == "ris") {
    return Mode::Ris;
  }
  if (name == "rris") {
    return Mode::RandomRis;
  }
  if (name == "free") {
    return Mode::Free;
  }
  throw ConfigError("unknown mode '" + name + "' (expected ris, rris, free)");
}

void ExperimentSpec::validate() const {
  if (values.empty()) {
    throw ConfigError("experiment needs at least one sweep value");
  }
  if (trials < 1) {
    throw ConfigError("experiment needs at least one trial");
  }
  if (modes.empty()) {
    throw ConfigError("experiment needs at least one mode");
  }
  if (threads < 1) {
    throw ConfigError("thread count must be positive");
  }
  codesign.validate();
  for (double value : values) {
    applySweep(scene, variable, value).validate();
  }
}

Scene applySweep(const Scene &scene, SweepVariable variable, double value) {
  Scene out = scene;
  auto asCount = [&](const char *what) {
    if (value != std::floor(value) || value < 0.0) {
      throw ConfigError(std::string(what) + " sweep values must be "
                                            "non-negative integers");
    }
    return static_cast<int>(value);
  };
  switch (variable) {
  case SweepVariable::Inr:
    for (auto &itf : out.interferences) {
      itf.power = scene.noise_power * dbToLinear(value);
    }
    break;
  case SweepVariable::InterferenceCount: {
    const int count = asCount("interference count");
    const auto &angles = referenceInterferenceAngles();
    if (count > static_cast<int>(angles.size())) {
      throw ConfigError("interference count sweep supports at most 15");
    }
    const double power = scene.interferences.empty()
                             ? scene.noise_power * dbToLinear(30.0)
                             : scene.interferences.front().power;
    out.interferences.clear();
    for (int i = 0; i < count; ++i) {
      out.interferences.push_back({angles[i], power});
    }
    break;
  }
  case SweepVariable::Distance:
    out.channel.distance = value;
    break;
  case SweepVariable::RisElements:
    out.geometry.m_ris = asCount("RIS size");
    break;
  case SweepVariable::RadarElements:
    out.geometry.n_radar = asCount("radar size");
    break;
  }
  return out;
}

SolveReport runMode(const Scene &scene, const ChannelMatrix &g, Mode mode,
                    const CodesignConfig &cfg, std::uint64_t seed) {
  switch (mode) {
  case Mode::Ris:
    return codesign(scene, g, cfg);
  case Mode::RandomRis:
    return codesignRandomRis(scene, g, cfg, seed);
  case Mode::Free:
    return codesignRisFree(scene, cfg);
  }
  throw ConfigError("unknown mode");
}

int ResultTable::failures() const {
  int total = 0;
  for (const auto &row : rows) {
    total += row.failures;
  }
  return total;
}

const ResultRow &ResultTable::row(double value, Mode mode) const {
  for (const auto &r : rows) {
    if (r.value == value && r.mode == mode) {
      return r;
    }
  }
  throw ConfigError("no result row for " + toString(variable) + " = " +
                    formatNumber(value) + ", mode " + toString(mode));
}

std::string ResultTable::toCsv() const {
  std::ostringstream out;
  out << toString(variable)
      << ",mode,trials,failures,mean_sinr_db,std_sinr_db,mean_iterations\n";
  for (const auto &r : rows) {
    out << formatNumber(r.value) << ',' << toString(r.mode) << ','
        << r.runs.size() << ',' << r.failures << ','
        << formatNumber(r.mean_sinr_db) << ',' << formatNumber(r.std_sinr_db)
        << ',' << formatNumber(r.mean_iterations) << '\n';
  }
  return out.str();
}

std::string ResultTable::timingCsv() const {
  std::ostringstream out;
  out << toString(variable) << ",mode,mean_millis\n";
  for (const auto &r : rows) {
    out << formatNumber(r.value) << ',' << toString(r.mode) << ','
        << formatNumber(r.mean_millis) << '\n';
  }
  return out.str();
}

namespace {

void summarize(ResultRow &row) {
  std::sort(row.runs.begin(), row.runs.end(),
            [](const TrialResult &a, const TrialResult &b) {
              return a.trial < b.trial;
            });
  std::vector<double> db;
  double sinr = 0.0;
  double iterations = 0.0;
  double millis = 0.0;
  for (const auto &run : row.runs) {
    if (!run.ok) {
      ++row.failures;
      continue;
    }
    sinr += run.sinr;
    iterations += run.iterations;
    millis += run.millis;
    db.push_back(linearToDb(run.sinr));
  }
  const double n = static_cast<double>(db.size());
  if (db.empty()) {
    row.mean_sinr = std::nan("");
    row.mean_sinr_db = std::nan("");
    row.std_sinr_db = std::nan("");
    row.mean_iterations = std::nan("");
    row.mean_millis = std::nan("");
    return;
  }
  row.mean_sinr = sinr / n;
  row.mean_sinr_db = linearToDb(row.mean_sinr);
  row.mean_iterations = iterations / n;
  row.mean_millis = millis / n;
  if (db.size() > 1) {
    double mean = 0.0;
    for (double x : db) {
      mean += x;
    }
    mean /= n;
    double ss = 0.0;
    for (double x : db) {
      ss += (x - mean) * (x - mean);
    }
    row.std_sinr_db = std::sqrt(ss / (n - 1.0));
  }
}

} // namespace

ResultTable runExperiment(const ExperimentSpec &spec) {
  spec.validate();
  ResultTable table;
  table.variable = spec.variable;
  const std::size_t n_modes = spec.modes.size();
  for (double value : spec.values) {
    for (Mode mode : spec.modes) {
      ResultRow row;
      row.value = value;
      row.mode = mode;
      row.runs.resize(spec.trials);
      table.rows.push_back(std::move(row));
    }
  }

  // One task per (sweep value, trial); each task draws its channel once and
  // runs every mode on it.
  const std::size_t n_tasks = spec.values.size() * spec.trials;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const std::size_t vi = task / spec.trials;
      const int trial = static_cast<int>(task % spec.trials);
      const std::uint64_t seed = trialSeed(spec.base_seed, trial);
      const Scene scene =
          applySweep(spec.scene, spec.variable, spec.values[vi]);
      ChannelMatrix g;
      std::string channel_error;
      try {
        g = drawChannel(scene.channel, scene.geometry, seed);
      } catch (const std::exception &e) {
        channel_error = e.what();
      }
      for (std::size_t mi = 0; mi < n_modes; ++mi) {
        TrialResult &result = table.rows[vi * n_modes + mi].runs[trial];
        result.trial = trial;
        result.seed = seed;
        if (!channel_error.empty()) {
          result.error = channel_error;
          continue;
        }
        try {
          const auto start = Clock::now();
          const SolveReport report =
              runMode(scene, g, spec.modes[mi], spec.codesign, seed);
          result.millis = elapsedMs(start);
          result.sinr = dbToLinear(report.finalSinrDb());
          result.iterations = static_cast<int>(report.iterations.size());
          result.summary_json = report.summaryJson();
          result.report_csv = report.toCsv();
          result.ok = std::isfinite(result.sinr);
          if (!result.ok) {
            result.error = "non-finite SINR";
          }
        } catch (const std::exception &e) {
          result.error = e.what();
        }
      }
    }
  };

  const int n_threads =
      static_cast<int>(std::min<std::size_t>(spec.threads, n_tasks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto &th : pool) {
      th.join();
    }
  }

  for (auto &row : table.rows) {
    summarize(row);
  }
  return table;
}

std::vector<SolverTrace>
runConvergenceComparison(const Scene &scene, const ChannelMatrix &g,
                         const std::vector<UqpSolver> &solvers,
                         const CodesignConfig &cfg, int baseline_max_iter) {
  if (!scene.hasRis()) {
    throw ConfigError("solver comparison needs a scene with an RIS");
  }
  const BeamformerState init = initialState(scene, g, cfg);
  const ChannelTerms terms = buildChannelTerms(scene, g, init.u, init.w);
  const UqpProblem first = buildUqp(terms, dinkelbachZ(terms, init.v));

  std::vector<SolverTrace> traces;
  for (UqpSolver solver : solvers) {
    SolverTrace trace;
    trace.solver = solver;
    CodesignConfig run = cfg;
    run.solver = solver;
    if (solver != UqpSolver::Rnm) {
      run.rnm.max_iter = std::max(run.rnm.max_iter, baseline_max_iter);
    }
    trace.first_subproblem =
        solveUqp(solver, first, CcmPoint(init.v), run.rnm).trace;
    trace.report = codesign(scene, g, run);
    for (const auto &it : trace.report.iterations) {
      if (it.ris_updated) {
        trace.update_iterations.push_back(it.ris.totalInnerIterations());
        trace.update_millis.push_back(it.ris.millis);
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::string comparisonCsv(const std::vector<SolverTrace> &traces) {
  std::ostringstream out;
  out << "solver,update,inner_iterations,sinr_db\n";
  for (const auto &t : traces) {
    out << toString(t.solver) << ",first_subproblem,"
        << t.first_subproblem.iterations << ",\n";
    for (std::size_t k = 0; k < t.update_iterations.size(); ++k) {
      out << toString(t.solver) << ',' << k + 1 << ','
          << t.update_iterations[k] << ','
          << formatNumber(t.report.iterations[k].sinr_db) << '\n';
    }
  }
  return out.str();
}

std::string comparisonTimingCsv(const std::vector<SolverTrace> &traces) {
  std::ostringstream out;
  out << "solver,update,millis\n";
  for (const auto &t : traces) {
    double first = 0.0;
    for (double ms : t.first_subproblem.millis) {
      first += ms;
    }
    out << toString(t.solver) << ",first_subproblem," << formatNumber(first)
        << '\n';
    for (std::size_t k = 0; k < t.update_millis.size(); ++k) {
      out << toString(t.solver) << ',' << k + 1 << ','
          << formatNumber(t.update_millis[k]) << '\n';
    }
  }
  return out.str();
}

OracleResult runOracle(const UqpProblem &problem, int phases) {
  const int m = problem.size();
  if (phases < 1 || phases > 16) {
    throw ConfigError("oracle supports 1..16 phases per element");
  }
  if (m < 1) {
    throw ConfigError("oracle needs at least one element");
  }
  double budget = std::pow(static_cast<double>(phases), m);
  if (budget > static_cast<double>(1 << 20)) {
    throw ConfigError("oracle enumeration budget exceeded: " +
                      std::to_string(phases) + "^" + std::to_string(m) +
                      " > 2^20");
  }
  const auto total = static_cast<std::int64_t>(budget);

  std::vector<Complex> alphabet(phases);
  for (int k = 0; k < phases; ++k) {
    alphabet[k] = std::polar(1.0, 2.0 * kPi * k / phases);
  }

  OracleResult best;
  best.f = std::numeric_limits<double>::infinity();
  std::vector<int> digits(m, 0);
  CVec v(m);
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t rest = code;
    for (int e = 0; e < m; ++e) {
      digits[e] = static_cast<int>(rest % phases);
      rest /= phases;
      v[e] = alphabet[digits[e]];
    }
    const double f = problem.objective(v);
    if (f < best.f) {
      best.f = f;
      best.v = v;
      best.phase_index = digits;
    }
  }
  return best;
}

double quantizationSlack(const UqpProblem &problem, const OracleResult &best,
                         int phases) {
  double slack = 0.0;
  for (int e = 0; e < problem.size(); ++e) {
    for (int step : {-1, 1}) {
      CVec v = best.v;
      const int k = (best.phase_index[e] + step + phases) % phases;
      v[e] = std::polar(1.0, 2.0 * kPi * k / phases);
      slack = std::max(slack, std::abs(problem.objective(v) - best.f));
    }
  }
  return slack;
}

std::vector<double> defaultBeampatternGrid() {
  std::vector<double> grid;
  for (int k = 0; k <= 1800; ++k) {
    grid.push_back(-90.0 + 0.1 * k);
  }
  return grid;
}

std::vector<std::pair<double, double>>
normalizedBeampattern(const Scene &scene, const ChannelMatrix &g,
                      const BeamformerState &state,
                      const std::vector<double> &grid_deg) {
  if (grid_deg.empty()) {
    throw ConfigError("beampattern grid is empty");
  }
  auto rows = beampattern(scene, g, state, grid_deg);
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto &r : rows) {
    peak = std::max(peak, r.second);
  }
  for (auto &r : rows) {
    r.second -= peak;
  }
  return rows;
}

std::string beampatternCsv(const std::vector<std::pair<double, double>> &rows) {
  std::ostringstream out;
  out << "angle_deg,pattern_db\n";
  for (const auto &[angle, db] : rows) {
    out << formatNumber(angle) << ',' << formatNumber(db) << '\n';
  }
  return out.str();
}

void emitBeampattern(const Scene &scene, const ChannelMatrix &g,
                     const BeamformerState &state,
                     const std::vector<double> &grid_deg,
                     const std::string &path) {
  writeFile(path,
            beampatternCsv(normalizedBeampattern(scene, g, state, grid_deg)));
}

void writeFile(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw Error("failed writing '" + path + "'");
  }
}

} // namespace risradar
