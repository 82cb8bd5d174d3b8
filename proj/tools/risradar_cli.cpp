// risradar_cli: single codesign runs, Monte Carlo sweeps, solver comparison,
// the brute-force UQP oracle and beampattern export.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "risradar/config.hpp"
#include "risradar/harness.hpp"

using namespace risradar;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRunFailure = 2;

struct Options {
  std::string config;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string solver = "rnm";
  std::string mode = "ris";
  std::string mu_policy = "adaptive";
  int threads = 1;
  int phases = 16;
  int elements = 4;
  bool seed_given = false;
  bool solver_given = false;
  bool mode_given = false;
};

Scene sceneFrom(const Options &opt) {
  return opt.config.empty() ? defaultScene() : loadScene(opt.config);
}

CodesignConfig codesignFrom(const Options &opt) {
  CodesignConfig cfg;
  cfg.solver = parseSolver(opt.solver);
  cfg.rnm.mu_policy = parseMuPolicy(opt.mu_policy);
  return cfg;
}

std::filesystem::path outDir(const Options &opt) {
  std::filesystem::path dir(opt.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create output directory '" + opt.out +
                "': " + ec.message());
  }
  return dir;
}

std::string tag(const std::string &mode, std::uint64_t seed) {
  return mode + "_seed" + std::to_string(seed);
}

int cmdCodesign(const Options &opt) {
  const Scene scene = sceneFrom(opt);
  const CodesignConfig cfg = codesignFrom(opt);
  const Mode mode = parseMode(opt.mode);
  const auto dir = outDir(opt);
  const ChannelMatrix g = drawChannel(scene.channel, scene.geometry, opt.seed);

  const SolveReport report = runMode(scene, g, mode, cfg, opt.seed);
  const std::string base = "codesign_" + tag(opt.mode, opt.seed);
  writeFile((dir / (base + ".csv")).string(), report.toCsv());
  writeFile((dir / (base + "_timing.csv")).string(), report.timingCsv());
  writeFile((dir / (base + ".json")).string(), report.summaryJson());
  std::cout << report.summaryJson();
  return kOk;
}

std::string numberTag(double value) {
  std::ostringstream s;
  s << std::setprecision(10) << value;
  return s.str();
}

int cmdSweep(const Options &opt) {
  if (opt.config.empty()) {
    throw ConfigError("sweep needs --config <experiment.json>");
  }
  ExperimentSpec spec = loadExperimentSpec(opt.config);
  if (opt.seed_given) {
    spec.base_seed = opt.seed;
  }
  if (opt.solver_given) {
    spec.codesign.solver = parseSolver(opt.solver);
  }
  if (opt.mode_given) {
    spec.modes = {parseMode(opt.mode)};
  }
  if (opt.threads > 1) {
    spec.threads = opt.threads;
  }
  spec.validate();
  const auto dir = outDir(opt);

  const ResultTable table = runExperiment(spec);
  const std::string var = toString(spec.variable);
  writeFile((dir / ("sweep_" + var + ".csv")).string(), table.toCsv());
  writeFile((dir / ("sweep_" + var + "_timing.csv")).string(),
            table.timingCsv());
  for (const auto &row : table.rows) {
    for (const auto &run : row.runs) {
      const std::string base = "run_" + var + "_" + numberTag(row.value) +
                               "_" + tag(toString(row.mode), run.seed);
      if (run.ok) {
        writeFile((dir / (base + ".json")).string(), run.summary_json);
        writeFile((dir / (base + ".csv")).string(), run.report_csv);
      } else {
        std::cerr << base << ": " << run.error << "\n";
      }
    }
  }
  std::cout << table.toCsv();
  if (table.failures() > 0) {
    std::cerr << table.failures() << " trial(s) failed\n";
    return kRunFailure;
  }
  return kOk;
}

int cmdCompare(const Options &opt) {
  const Scene scene = sceneFrom(opt);
  const CodesignConfig cfg = codesignFrom(opt);
  const auto dir = outDir(opt);
  const ChannelMatrix g = drawChannel(scene.channel, scene.geometry, opt.seed);
  std::vector<UqpSolver> solvers{UqpSolver::Rnm, UqpSolver::Rcg,
                                 UqpSolver::Rgd};
  if (opt.solver_given) {
    solvers = {parseSolver(opt.solver)};
  }
  const auto traces = runConvergenceComparison(scene, g, solvers, cfg);
  writeFile((dir / "compare.csv").string(), comparisonCsv(traces));
  writeFile((dir / "compare_timing.csv").string(),
            comparisonTimingCsv(traces));
  for (const auto &t : traces) {
    const std::string name = "trace_" + toString(t.solver);
    writeFile((dir / (name + ".csv")).string(),
              t.first_subproblem.toCsv(false));
    writeFile((dir / (name + "_timing.csv")).string(),
              t.first_subproblem.toCsv(true));
    std::cout << toString(t.solver)
              << ": first subproblem iterations = "
              << t.first_subproblem.iterations
              << ", final SINR = " << t.report.finalSinrDb() << " dB\n";
  }
  return kOk;
}

int cmdOracle(const Options &opt) {
  Scene scene = sceneFrom(opt);
  scene.geometry.m_ris = opt.elements;
  const CodesignConfig cfg = codesignFrom(opt);
  const auto dir = outDir(opt);
  const ChannelMatrix g = drawChannel(scene.channel, scene.geometry, opt.seed);
  const BeamformerState init = initialState(scene, g, cfg);
  const ChannelTerms terms = buildChannelTerms(scene, g, init.u, init.w);
  const UqpProblem problem = buildUqp(terms, dinkelbachZ(terms, init.v));

  const OracleResult best = runOracle(problem, opt.phases);
  const double slack = quantizationSlack(problem, best, opt.phases);
  const UqpSolution sol =
      solveUqp(cfg.solver, problem, CcmPoint(init.v), cfg.rnm);
  const double f_solver = problem.objective(sol.v.vec());

  std::ostringstream csv;
  csv << std::setprecision(12);
  csv << "element,phase_index,oracle_phase_rad,solver_phase_rad\n";
  for (int e = 0; e < problem.size(); ++e) {
    csv << e << ',' << best.phase_index[e] << ',' << std::arg(best.v[e])
        << ',' << std::arg(sol.v.vec()[e]) << '\n';
  }
  writeFile((dir / ("oracle_" + tag(opt.solver, opt.seed) + ".csv")).string(),
            csv.str());
  std::cout << std::setprecision(12) << "oracle f = " << best.f
            << "\nsolver f = " << f_solver << "\nquantization slack = "
            << slack << "\n";
  return f_solver <= best.f + slack ? kOk : kRunFailure;
}

int cmdBeampattern(const Options &opt) {
  const Scene scene = sceneFrom(opt);
  const CodesignConfig cfg = codesignFrom(opt);
  const Mode mode = parseMode(opt.mode);
  const auto dir = outDir(opt);
  const ChannelMatrix g = drawChannel(scene.channel, scene.geometry, opt.seed);
  const SolveReport report = runMode(scene, g, mode, cfg, opt.seed);
  const std::string path =
      (dir / ("beampattern_" + tag(opt.mode, opt.seed) + ".csv")).string();
  if (mode == Mode::Free) {
    Scene free = scene;
    free.geometry.m_ris = 0;
    ChannelMatrix none;
    none.g.resize(0, scene.geometry.n_radar);
    emitBeampattern(free, none, report.state, defaultBeampatternGrid(), path);
  } else {
    emitBeampattern(scene, g, report.state, defaultBeampatternGrid(), path);
  }
  std::cout << path << "\n";
  return kOk;
}

void addCommon(CLI::App *cmd, Options &opt) {
  cmd->add_option("--config", opt.config, "JSON scene or experiment file");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&opt](const std::uint64_t &s) {
        opt.seed = s;
        opt.seed_given = true;
      },
      "channel seed (base seed for sweeps)");
  cmd->add_option("--out", opt.out, "output directory")->capture_default_str();
  cmd->add_option_function<std::string>(
         "--solver",
         [&opt](const std::string &s) {
           opt.solver = s;
           opt.solver_given = true;
         },
         "UQP solver")
      ->check(CLI::IsMember({"rnm", "rcg", "rgd"}));
  cmd->add_option("--mu-policy", opt.mu_policy, "RNM loading policy")
      ->check(CLI::IsMember({"adaptive", "certified"}))
      ->capture_default_str();
}

void addMode(CLI::App *cmd, Options &opt) {
  cmd->add_option_function<std::string>(
         "--mode",
         [&opt](const std::string &m) {
           opt.mode = m;
           opt.mode_given = true;
         },
         "RIS mode")
      ->check(CLI::IsMember({"ris", "rris", "free"}));
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"RIS-assisted radar transmit/receive/RIS codesign"};
  app.require_subcommand(1);
  Options opt;

  auto *codesign_cmd = app.add_subcommand("codesign", "single codesign run");
  addCommon(codesign_cmd, opt);
  addMode(codesign_cmd, opt);

  auto *sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep");
  addCommon(sweep_cmd, opt);
  addMode(sweep_cmd, opt);
  sweep_cmd->add_option("--threads", opt.threads, "worker threads");

  auto *compare_cmd =
      app.add_subcommand("compare-solvers", "RNM vs RCG vs RGD");
  addCommon(compare_cmd, opt);

  auto *oracle_cmd =
      app.add_subcommand("oracle", "exhaustive phase-grid check of the solver");
  addCommon(oracle_cmd, opt);
  oracle_cmd->add_option("--phases", opt.phases, "phases per element")
      ->capture_default_str();
  oracle_cmd->add_option("--elements", opt.elements, "RIS elements")
      ->capture_default_str();

  auto *beam_cmd = app.add_subcommand("beampattern", "joint beampattern CSV");
  addCommon(beam_cmd, opt);
  addMode(beam_cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*codesign_cmd) {
      return cmdCodesign(opt);
    }
    if (*sweep_cmd) {
      return cmdSweep(opt);
    }
    if (*compare_cmd) {
      return cmdCompare(opt);
    }
    if (*oracle_cmd) {
      return cmdOracle(opt);
    }
    if (*beam_cmd) {
      return cmdBeampattern(opt);
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
  return kConfigError;
}
